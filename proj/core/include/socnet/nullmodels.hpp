#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "socnet/graph.hpp"

namespace socnet {

enum class NullModel {
  /// Random double-edge swaps; keeps the degree sequence.
  nm1,
  /// Swaps between edges sharing an endpoint degree; additionally keeps the
  /// multiset of endpoint-degree pairs over edges.
  nm2,
};

const char* to_string(NullModel model) noexcept;
NullModel parse_null_model(const std::string& name);

struct ShuffleConfig {
  NullModel model = NullModel::nm1;
  /// Successful swaps to perform, in units of |E|.
  double swap_multiplier = 5.0;
  std::uint64_t seed = 0;
  /// Proposal budget, in units of swap_multiplier * |E|.
  std::uint32_t max_attempt_factor = 100;

  void validate() const;
};

struct ShuffleResult {
  SocialGraph graph;
  std::uint64_t target_swaps = 0;
  std::uint64_t performed_swaps = 0;
  std::uint64_t proposals = 0;
  /// NM2 only: edges whose endpoint degrees are both held by a single node.
  std::uint64_t skipped_edges = 0;
  /// Set when the proposal budget ran out before target_swaps was reached.
  bool exhausted = false;
};

/// Degree-preserving randomization: pick two distinct edges, rewire their
/// endpoints, reject self-loops and multi-edges. Runs until
/// ceil(swap_multiplier * |E|) swaps succeeded or the proposal budget is
/// spent. Requires |E| >= 2.
ShuffleResult nm1_shuffle(const SocialGraph& g, const ShuffleConfig& cfg);

/// Degree-correlated randomization: pick an edge end at random, pick
/// another edge end with the same node degree, and exchange the two nodes.
/// Same stopping rule as nm1_shuffle.
ShuffleResult nm2_shuffle(const SocialGraph& g, const ShuffleConfig& cfg);

/// Dispatches on cfg.model.
ShuffleResult shuffle(const SocialGraph& g, const ShuffleConfig& cfg);

/// A named vector-valued statistic evaluated on every realization.
struct GraphStatistic {
  std::string name;
  std::function<std::vector<double>(const SocialGraph&)> evaluate;
};

struct StatisticSummary {
  std::string name;
  std::vector<double> mean;
  /// Standard error of the mean; zero when R = 1.
  std::vector<double> standard_error;
};

struct RealizationSummary {
  std::uint64_t seed = 0;
  std::uint64_t performed_swaps = 0;
  std::uint64_t proposals = 0;
  std::uint64_t skipped_edges = 0;
  bool exhausted = false;
};

struct NullEnsembleStats {
  ShuffleConfig config;
  std::size_t realizations = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<RealizationSummary> runs;
  std::vector<StatisticSummary> statistics;

  std::size_t warning_count() const;
  /// Throws when no statistic with that name was evaluated.
  const StatisticSummary& statistic(const std::string& name) const;
};

struct EnsembleOptions {
  std::size_t realizations = 100;
  unsigned threads = 1;
  /// Fail when more than this fraction of realizations exhausted their
  /// proposal budget.
  double max_warning_fraction = 0.10;
};

/// Seed of realization i.
std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t index);

/// Runs R independent shuffles with seeds realization_seed(cfg.seed, i),
/// evaluates every statistic on each and averages them. The reduction runs
/// in realization order, so the result does not depend on `threads`.
/// Throws Error(ensemble_warning_rate) when too many realizations warn.
NullEnsembleStats run_ensemble(const SocialGraph& g, const ShuffleConfig& cfg,
                               const EnsembleOptions& options,
                               std::span<const GraphStatistic> statistics);

}  // namespace socnet
