#include "socnet/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socnet/error.hpp"

namespace socnet {

ClassLinkMatrix class_link_matrix(const SocialGraph& g, const ClassPartition& partition) {
  if (partition.assignment.size() != g.node_count()) {
    throw Error(ErrorCode::invalid_argument, "class_link_matrix: partition does not cover the graph");
  }
  const std::size_t n = partition.n;
  ClassLinkMatrix counts(n, n, 0);
  for (const Edge& e : g.edges()) {
    const std::uint32_t a = partition.assignment[e.u];
    const std::uint32_t b = partition.assignment[e.v];
    if (a >= n || b >= n) {
      throw Error(ErrorCode::invalid_argument, "class_link_matrix: node without class");
    }
    ++counts(a, b);
    if (a != b) ++counts(b, a);
  }
  return counts;
}

GraphStatistic class_link_statistic(const ClassPartition& partition) {
  return {kClassLinksStatistic, [&partition](const SocialGraph& g) {
            const ClassLinkMatrix m = class_link_matrix(g, partition);
            return std::vector<double>(m.values().begin(), m.values().end());
          }};
}

Matrix<double> mean_class_links(const NullEnsembleStats& stats, std::size_t n) {
  const StatisticSummary& s = stats.statistic(kClassLinksStatistic);
  if (s.mean.size() != n * n) {
    throw Error(ErrorCode::invalid_argument, "mean_class_links: class count mismatch");
  }
  Matrix<double> m(n, n);
  std::copy(s.mean.begin(), s.mean.end(), m.values().begin());
  return m;
}

StratMatrix stratification_matrix(const ClassLinkMatrix& counts, const Matrix<double>& null_counts,
                                  double reliability_floor) {
  if (counts.rows() != null_counts.rows() || counts.cols() != null_counts.cols()) {
    throw Error(ErrorCode::invalid_argument, "stratification_matrix: shape mismatch");
  }
  const std::size_t r = counts.rows(), c = counts.cols();
  StratMatrix out{Matrix<double>(r, c, 0.0), Matrix<CellStatus>(r, c, CellStatus::ok)};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = null_counts(i, j);
      if (!(expected > 0.0)) {
        out.ratio(i, j) = std::nan("");
        out.status(i, j) = CellStatus::undefined;
        continue;
      }
      out.ratio(i, j) = static_cast<double>(counts(i, j)) / expected;
      if (expected < reliability_floor) out.status(i, j) = CellStatus::unreliable;
    }
  }
  return out;
}

Matrix<double> normalize_rows(const Matrix<double>& m) {
  Matrix<double> out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (double x : m.row(i)) {
      if (!std::isfinite(x)) throw Error(ErrorCode::invalid_argument, "normalize_rows: undefined cell");
      sum += x;
    }
    if (!(sum > 0.0)) throw Error(ErrorCode::invalid_argument, "normalize_rows: zero row");
    for (double& x : out.row(i)) x /= sum;
  }
  return out;
}

// --- rich club -----------------------------------------------------------------------

RemovalSchedule make_removal_schedule(std::span<const double> amp, std::size_t segments) {
  if (segments < 2) throw Error(ErrorCode::invalid_argument, "removal schedule: segments must be >= 2");
  for (double a : amp) {
    if (!std::isfinite(a) || a < 0.0) {
      throw Error(ErrorCode::invalid_argument, "removal schedule: AMP must be finite and >= 0");
    }
  }
  std::vector<std::uint32_t> order(amp.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return amp[a] < amp[b] || (amp[a] == amp[b] && a < b);
  });

  RemovalSchedule s;
  s.rank.resize(amp.size());
  std::vector<double> cumulative(amp.size() + 1, 0.0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    s.rank[order[pos]] = static_cast<std::uint32_t>(pos);
    cumulative[pos + 1] = cumulative[pos] + amp[order[pos]];
  }
  const double total = cumulative.back();
  std::size_t removed = 0;
  for (std::size_t step = 0; step < segments; ++step) {
    const double threshold = static_cast<double>(step) * total / static_cast<double>(segments);
    while (removed < order.size() && cumulative[removed] < threshold) ++removed;
    s.removed.push_back(removed);
    s.thresholds.push_back(threshold);
  }
  return s;
}

ResidualDensity residual_density(const SocialGraph& g, const RemovalSchedule& schedule) {
  const std::size_t n = g.node_count();
  if (schedule.rank.size() != n) {
    throw Error(ErrorCode::invalid_argument, "residual_density: schedule does not match graph");
  }
  // An edge leaves with its first removed endpoint. surviving[m] counts the
  // edges still present once the first m nodes are gone.
  std::vector<std::size_t> surviving(n + 1, 0);
  for (const Edge& e : g.edges()) ++surviving[std::min(schedule.rank[e.u], schedule.rank[e.v])];
  for (std::size_t m = n; m-- > 0;) surviving[m] += surviving[m + 1];
  // surviving[m] now counts edges whose earliest endpoint position is >= m.

  ResidualDensity out;
  out.thresholds = schedule.thresholds;
  for (std::size_t removed : schedule.removed) {
    const std::size_t nodes = n - removed;
    const std::size_t links = surviving[removed];
    out.nodes_remaining.push_back(nodes);
    out.edges_remaining.push_back(links);
    out.phi.push_back(nodes < 2 ? std::nan("")
                                : 2.0 * static_cast<double>(links) /
                                      (static_cast<double>(nodes) * static_cast<double>(nodes - 1)));
  }
  return out;
}

ResidualDensity residual_density_curve(const SocialGraph& g, std::span<const double> amp,
                                       std::size_t segments) {
  if (amp.size() != g.node_count()) {
    throw Error(ErrorCode::invalid_argument, "residual_density_curve: AMP does not cover the graph");
  }
  return residual_density(g, make_removal_schedule(amp, segments));
}

GraphStatistic density_statistic(const RemovalSchedule& schedule) {
  return {kDensityStatistic,
          [&schedule](const SocialGraph& g) { return residual_density(g, schedule).phi; }};
}

std::vector<double> rich_club(std::span<const double> phi, std::span<const double> phi_null) {
  if (phi.size() != phi_null.size()) {
    throw Error(ErrorCode::invalid_argument, "rich_club: curve lengths differ");
  }
  std::vector<double> rho(phi.size(), std::nan(""));
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (std::isfinite(phi[k]) && std::isfinite(phi_null[k]) && phi_null[k] > 0.0) {
      rho[k] = phi[k] / phi_null[k];
    }
  }
  return rho;
}

RichClubCurve assemble_rich_club(const ResidualDensity& observed, const StatisticSummary& null_density) {
  RichClubCurve c;
  c.thresholds = observed.thresholds;
  c.phi = observed.phi;
  c.phi_null = null_density.mean;
  c.phi_null_se = null_density.standard_error;
  c.rho = rich_club(c.phi, c.phi_null);
  c.rho_se.resize(c.rho.size(), std::nan(""));
  for (std::size_t k = 0; k < c.rho.size(); ++k) {
    if (std::isfinite(c.rho[k])) c.rho_se[k] = c.rho[k] * c.phi_null_se[k] / c.phi_null[k];
  }
  c.nodes_remaining = observed.nodes_remaining;
  c.edges_remaining = observed.edges_remaining;
  return c;
}

}  // namespace socnet
