#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socnet/geo.hpp"
#include "socnet/stats.hpp"

namespace socnet {

class SocialGraph;

/// Spending (and optionally debt) of one user in one month of the window.
struct TransactionRecord {
  std::string user;
  int month = 0;
  double purchase = 0.0;
  std::optional<double> debt;
};

enum class Gender { female, male };

struct EgoProfile {
  std::string user;
  double amp = 0.0;
  std::optional<double> amd;
  std::optional<double> salary;
  std::optional<double> income;
  std::optional<double> age;
  std::optional<Gender> gender;
  std::optional<GeoPoint> zip_point;
  std::optional<GeoPoint> home;
  std::optional<GeoPoint> work;
};

/// Total purchases divided by the number of months with a positive monthly
/// total. Records sharing a month are summed. nullopt when the user has no
/// active month.
std::optional<double> average_monthly_purchase(std::span<const TransactionRecord> records);

/// Total debt divided by the number of months with positive debt. nullopt
/// when the user never had debt.
std::optional<double> average_monthly_debt(std::span<const TransactionRecord> records);

struct EconomicIndicators {
  std::optional<double> amp;
  std::optional<double> amd;
};

/// AMP and AMD for every user appearing in `records`, keyed by user id.
std::map<std::string, EconomicIndicators> compute_indicators(
    std::span<const TransactionRecord> records);

// --- inequality ------------------------------------------------------------

struct LorenzPoint {
  double f = 0.0;
  double c = 0.0;
};

/// Cumulative share of the total held by the poorest fraction f, one point
/// per individual plus the origin. Endpoints are exactly (0,0) and (1,1).
class LorenzCurve {
 public:
  std::span<const LorenzPoint> points() const noexcept { return points_; }
  std::size_t population() const noexcept { return points_.size() - 1; }

  /// Linear interpolation between ranks.
  double at(double f) const;

 private:
  friend LorenzCurve lorenz_curve(std::span<const double> values);
  std::vector<LorenzPoint> points_;
};

/// Throws Error(insufficient_data) for empty or all-zero input and
/// Error(invalid_argument) for negative or non-finite values.
LorenzCurve lorenz_curve(std::span<const double> values);

/// 1 - 2 * (trapezoidal area under the curve).
double gini(const LorenzCurve& curve);

/// Where the curve meets the anti-diagonal 1 - C(f) = f: the top fraction
/// of people and the share of the total they hold.
struct ParetoSplit {
  double top_people = 0.0;
  double top_wealth = 0.0;
};
ParetoSplit pareto_split(const LorenzCurve& curve);

/// Hill estimate of the tail exponent over the largest `tail_fraction` of
/// the values. Needs at least 50 tail values and a non-degenerate tail.
double pareto_tail_index(std::span<const double> values, double tail_fraction = 0.2);

/// Tail exponent implied by a Gini coefficient for an exact Pareto law,
/// G = 1 / (2 alpha - 1).
double pareto_index_from_gini(double gini_coefficient);

// --- classes ---------------------------------------------------------------

inline constexpr std::uint32_t kNoClass = UINT32_MAX;

/// Assignment of every node to one of n classes, 0-based and ordered by
/// ascending wealth (class 0 is the poorest).
struct ClassPartition {
  std::size_t n = 0;
  std::vector<std::uint32_t> assignment;
  std::vector<double> class_sums;
  std::vector<std::size_t> class_sizes;
};

/// Sort by AMP (ties by node index) and cut the cumulative AMP into n equal
/// shares. The individual whose inclusion reaches the k-th share closes
/// class k. `amp` is indexed by node and must be strictly positive.
ClassPartition partition_equal_wealth(std::span<const double> amp, std::size_t n = 9);

struct ClassDemographics {
  std::size_t size = 0;
  double mean_amp = 0.0;
  std::optional<double> mean_age;
  std::optional<double> fraction_women;
};

/// Exact per-class aggregates. Missing age or gender removes an individual
/// from that aggregate only. `profiles` is indexed by node.
std::vector<ClassDemographics> class_demographics(const ClassPartition& partition,
                                                  std::span<const EgoProfile> profiles);

/// Pearson correlation between node degree and wealth (`amp` by node).
Correlation degree_wealth_correlation(const SocialGraph& g, std::span<const double> amp);

}  // namespace socnet
