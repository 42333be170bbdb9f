#include "socnet/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socnet/error.hpp"
#include "socnet/graph.hpp"

namespace socnet {

namespace {

// Monthly totals of one indicator; months are summed before the activity
// test so split rows of the same month count once.
template <typename Value>
std::optional<double> monthly_average(std::span<const TransactionRecord> records, Value value) {
  std::map<int, double> months;
  for (const TransactionRecord& r : records) {
    if (const std::optional<double> x = value(r)) months[r.month] += *x;
  }
  double total = 0.0;
  std::size_t active = 0;
  for (const auto& [month, amount] : months) {
    if (amount > 0.0) {
      total += amount;
      ++active;
    }
  }
  if (active == 0) return std::nullopt;
  return total / static_cast<double>(active);
}

}  // namespace

std::optional<double> average_monthly_purchase(std::span<const TransactionRecord> records) {
  return monthly_average(records,
                         [](const TransactionRecord& r) { return std::optional<double>(r.purchase); });
}

std::optional<double> average_monthly_debt(std::span<const TransactionRecord> records) {
  return monthly_average(records, [](const TransactionRecord& r) { return r.debt; });
}

std::map<std::string, EconomicIndicators> compute_indicators(
    std::span<const TransactionRecord> records) {
  std::vector<const TransactionRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->user < b->user; });

  std::map<std::string, EconomicIndicators> out;
  std::vector<TransactionRecord> group;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    group.clear();
    while (j < sorted.size() && sorted[j]->user == sorted[i]->user) group.push_back(*sorted[j++]);
    out.emplace(sorted[i]->user,
                EconomicIndicators{average_monthly_purchase(group), average_monthly_debt(group)});
    i = j;
  }
  return out;
}

// --- inequality -----------------------------------------------------------------

LorenzCurve lorenz_curve(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::insufficient_data, "lorenz_curve: no values");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_argument, "lorenz_curve: values must be finite and >= 0");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::insufficient_data, "lorenz_curve: all values are zero");

  LorenzCurve curve;
  const auto n = static_cast<double>(sorted.size());
  curve.points_.reserve(sorted.size() + 1);
  curve.points_.push_back({0.0, 0.0});
  double cum = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    curve.points_.push_back({static_cast<double>(i + 1) / n, cum / total});
  }
  curve.points_.back() = {1.0, 1.0};
  return curve;
}

double LorenzCurve::at(double f) const {
  if (f <= 0.0) return 0.0;
  if (f >= 1.0) return 1.0;
  const double pos = f * static_cast<double>(population());
  const auto k = static_cast<std::size_t>(pos);
  if (k >= population()) return 1.0;
  const double t = pos - static_cast<double>(k);
  return points_[k].c + t * (points_[k + 1].c - points_[k].c);
}

double gini(const LorenzCurve& curve) {
  const auto pts = curve.points();
  // Area = sum (c_{k-1} + c_k) / (2N); G = 1 - 2 * area.
  double twice_area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) twice_area += pts[k - 1].c + pts[k].c;
  return 1.0 - twice_area / static_cast<double>(curve.population());
}

ParetoSplit pareto_split(const LorenzCurve& curve) {
  const auto pts = curve.points();
  // h(f) = C(f) + f - 1 goes from -1 at f=0 to +1 at f=1 and is strictly
  // increasing; find its root on the piecewise-linear curve.
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double h1 = pts[k].c + pts[k].f - 1.0;
    if (h1 < 0.0) continue;
    const double h0 = pts[k - 1].c + pts[k - 1].f - 1.0;
    const double t = h1 == h0 ? 0.0 : -h0 / (h1 - h0);
    const double f = pts[k - 1].f + t * (pts[k].f - pts[k - 1].f);
    const double c = pts[k - 1].c + t * (pts[k].c - pts[k - 1].c);
    return {1.0 - f, 1.0 - c};
  }
  return {0.0, 0.0};
}

double pareto_tail_index(std::span<const double> values, double tail_fraction) {
  if (!(tail_fraction > 0.0) || tail_fraction >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "pareto_tail_index: tail_fraction must be in (0, 1)");
  }
  const auto k = static_cast<std::size_t>(tail_fraction * static_cast<double>(values.size()));
  if (k < 50 || k >= values.size()) {
    throw Error(ErrorCode::insufficient_data, "pareto_tail_index: fewer than 50 tail values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                   std::greater<>());
  const double threshold = sorted[k];
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::insufficient_data, "pareto_tail_index: non-positive tail threshold");
  }
  double log_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) log_sum += std::log(sorted[i] / threshold);
  if (!(log_sum > 0.0)) {
    throw Error(ErrorCode::insufficient_data, "pareto_tail_index: degenerate tail");
  }
  return static_cast<double>(k) / log_sum;
}

double pareto_index_from_gini(double gini_coefficient) {
  if (!(gini_coefficient > 0.0) || gini_coefficient >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "pareto_index_from_gini: gini must be in (0, 1)");
  }
  return 0.5 * (1.0 + 1.0 / gini_coefficient);
}

// --- classes ------------------------------------------------------------------------

ClassPartition partition_equal_wealth(std::span<const double> amp, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "partition: class count must be >= 1");
  if (n > amp.size()) {
    throw Error(ErrorCode::invalid_argument, "partition: more classes than individuals");
  }
  for (double a : amp) {
    if (!std::isfinite(a) || !(a > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "partition: AMP values must be positive");
    }
  }
  std::vector<NodeIndex> order(amp.size());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
    return amp[a] < amp[b] || (amp[a] == amp[b] && a < b);
  });

  double total = 0.0;
  for (NodeIndex v : order) total += amp[v];

  ClassPartition p;
  p.n = n;
  p.assignment.assign(amp.size(), kNoClass);
  p.class_sums.assign(n, 0.0);
  p.class_sizes.assign(n, 0);
  std::size_t current = 0;
  double cum = 0.0;
  for (NodeIndex v : order) {
    cum += amp[v];
    p.assignment[v] = static_cast<std::uint32_t>(current);
    p.class_sums[current] += amp[v];
    ++p.class_sizes[current];
    const double boundary = static_cast<double>(current + 1) * total / static_cast<double>(n);
    if (current + 1 < n && cum >= boundary) ++current;
  }
  return p;
}

std::vector<ClassDemographics> class_demographics(const ClassPartition& partition,
                                                  std::span<const EgoProfile> profiles) {
  if (profiles.size() != partition.assignment.size()) {
    throw Error(ErrorCode::invalid_argument, "class_demographics: profiles do not match partition");
  }
  struct Acc {
    std::size_t size = 0, aged = 0, gendered = 0, women = 0;
    double amp = 0.0, age = 0.0;
  };
  std::vector<Acc> acc(partition.n);
  for (std::size_t v = 0; v < profiles.size(); ++v) {
    const std::uint32_t c = partition.assignment[v];
    if (c >= partition.n) continue;
    Acc& a = acc[c];
    const EgoProfile& p = profiles[v];
    ++a.size;
    a.amp += p.amp;
    if (p.age) {
      ++a.aged;
      a.age += *p.age;
    }
    if (p.gender) {
      ++a.gendered;
      if (*p.gender == Gender::female) ++a.women;
    }
  }
  std::vector<ClassDemographics> out(partition.n);
  for (std::size_t c = 0; c < partition.n; ++c) {
    const Acc& a = acc[c];
    out[c].size = a.size;
    out[c].mean_amp = a.size ? a.amp / static_cast<double>(a.size) : 0.0;
    if (a.aged) out[c].mean_age = a.age / static_cast<double>(a.aged);
    if (a.gendered) {
      out[c].fraction_women = static_cast<double>(a.women) / static_cast<double>(a.gendered);
    }
  }
  return out;
}

Correlation degree_wealth_correlation(const SocialGraph& g, std::span<const double> amp) {
  if (amp.size() != g.node_count()) {
    throw Error(ErrorCode::invalid_argument, "degree_wealth_correlation: size mismatch");
  }
  std::vector<double> k(g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v) k[v] = static_cast<double>(g.degree(v));
  return pearson_with_se(k, amp);
}

}  // namespace socnet
