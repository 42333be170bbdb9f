#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "socnet/econometrics.hpp"
#include "socnet/graph.hpp"
#include "socnet/matrix.hpp"
#include "socnet/nullmodels.hpp"

namespace socnet {

/// Symmetric class-pair edge counts. Intra-class edges are counted once on
/// the diagonal, so the upper triangle sums to |E|.
using ClassLinkMatrix = Matrix<std::uint64_t>;

ClassLinkMatrix class_link_matrix(const SocialGraph& g, const ClassPartition& partition);

inline constexpr const char* kClassLinksStatistic = "class_links";
inline constexpr const char* kDensityStatistic = "residual_density";

/// Ensemble statistic producing the flattened class link matrix. Holds a
/// reference to `partition`, which must outlive the statistic.
GraphStatistic class_link_statistic(const ClassPartition& partition);

/// Mean class link matrix of an ensemble that evaluated class_link_statistic.
Matrix<double> mean_class_links(const NullEnsembleStats& stats, std::size_t n);

enum class CellStatus { ok, unreliable, undefined };

/// Observed over null-expected link counts per class pair.
struct StratMatrix {
  Matrix<double> ratio;
  Matrix<CellStatus> status;

  bool reliable(std::size_t i, std::size_t j) const {
    return status(i, j) == CellStatus::ok;
  }
};

/// Element-wise ratio. Cells whose null mean is zero are undefined (NaN);
/// cells whose null mean is below `reliability_floor` expected links keep
/// their ratio but are flagged unreliable.
StratMatrix stratification_matrix(const ClassLinkMatrix& counts,
                                  const Matrix<double>& null_counts,
                                  double reliability_floor = 1.0);

/// Divides each row by its sum. Throws on a non-finite cell or a zero row.
Matrix<double> normalize_rows(const Matrix<double>& m);

// --- rich club ---------------------------------------------------------------

/// Wealth-ordered removal plan shared by the observed graph and its null
/// realizations. Step s removes the shortest wealth-sorted prefix whose
/// cumulative AMP reaches s / segments of the total.
struct RemovalSchedule {
  /// Position of every node in ascending (AMP, node index) order.
  std::vector<std::uint32_t> rank;
  /// Number of removed nodes at each step, non-decreasing, first is 0.
  std::vector<std::size_t> removed;
  /// Cumulative AMP threshold P_> of each step.
  std::vector<double> thresholds;
};

RemovalSchedule make_removal_schedule(std::span<const double> amp, std::size_t segments = 100);

struct ResidualDensity {
  std::vector<double> thresholds;
  std::vector<std::size_t> nodes_remaining;
  std::vector<std::size_t> edges_remaining;
  /// 2L / (N (N - 1)) of the residual graph; NaN when fewer than 2 nodes remain.
  std::vector<double> phi;
};

ResidualDensity residual_density(const SocialGraph& g, const RemovalSchedule& schedule);
ResidualDensity residual_density_curve(const SocialGraph& g, std::span<const double> amp,
                                       std::size_t segments = 100);

/// Ensemble statistic producing the residual density at every step. Holds a
/// reference to `schedule`, which must outlive the statistic.
GraphStatistic density_statistic(const RemovalSchedule& schedule);

/// Pointwise phi / phi_null; NaN where either is undefined or phi_null is 0.
std::vector<double> rich_club(std::span<const double> phi, std::span<const double> phi_null);

struct RichClubCurve {
  std::vector<double> thresholds;
  std::vector<double> phi;
  std::vector<double> phi_null;
  std::vector<double> phi_null_se;
  std::vector<double> rho;
  /// Delta-method error of rho from the ensemble error of phi_null.
  std::vector<double> rho_se;
  std::vector<std::size_t> nodes_remaining;
  std::vector<std::size_t> edges_remaining;
};

/// Combines an observed density curve with the ensemble density summary.
RichClubCurve assemble_rich_club(const ResidualDensity& observed,
                                 const StatisticSummary& null_density);

}  // namespace socnet
