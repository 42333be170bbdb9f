#include "socnet/nullmodels.hpp"

#include <absl/container/flat_hash_set.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "socnet/error.hpp"
#include "socnet/random.hpp"

namespace socnet {

namespace {

std::uint64_t edge_key(NodeIndex a, NodeIndex b) noexcept {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

class EdgeSet {
 public:
  explicit EdgeSet(std::span<const Edge> edges) {
    keys_.reserve(edges.size());
    for (const Edge& e : edges) keys_.insert(edge_key(e.u, e.v));
  }
  bool contains(NodeIndex a, NodeIndex b) const { return keys_.contains(edge_key(a, b)); }
  void replace(NodeIndex a, NodeIndex b, NodeIndex c, NodeIndex d) {
    keys_.erase(edge_key(a, b));
    keys_.insert(edge_key(c, d));
  }

 private:
  absl::flat_hash_set<std::uint64_t> keys_;
};

struct Budget {
  std::uint64_t target = 0;
  std::uint64_t max_proposals = 0;
};

Budget make_budget(const ShuffleConfig& cfg, std::size_t edge_count) {
  const double swaps = cfg.swap_multiplier * static_cast<double>(edge_count);
  return {static_cast<std::uint64_t>(std::ceil(swaps)),
          static_cast<std::uint64_t>(std::ceil(swaps * cfg.max_attempt_factor))};
}

void require_swappable(const SocialGraph& g, const ShuffleConfig& cfg) {
  cfg.validate();
  if (g.edge_count() < 2) {
    throw Error(ErrorCode::insufficient_data, "shuffle: need at least two edges");
  }
}

ShuffleResult finish(const SocialGraph& g, std::vector<Edge> edges, const Budget& budget,
                     std::uint64_t performed, std::uint64_t proposals) {
  ShuffleResult r;
  r.graph = SocialGraph(g.node_count(), std::move(edges),
                        std::vector<std::string>(g.ids().begin(), g.ids().end()));
  r.target_swaps = budget.target;
  r.performed_swaps = performed;
  r.proposals = proposals;
  r.exhausted = performed < budget.target;
  return r;
}

}  // namespace

const char* to_string(NullModel model) noexcept {
  return model == NullModel::nm1 ? "nm1" : "nm2";
}

NullModel parse_null_model(const std::string& name) {
  if (name == "nm1" || name == "NM1") return NullModel::nm1;
  if (name == "nm2" || name == "NM2") return NullModel::nm2;
  throw Error(ErrorCode::invalid_argument, "unknown null model '" + name + "'");
}

void ShuffleConfig::validate() const {
  if (!(swap_multiplier > 0.0) || !std::isfinite(swap_multiplier)) {
    throw Error(ErrorCode::invalid_argument, "swap_multiplier must be positive");
  }
  if (max_attempt_factor == 0) {
    throw Error(ErrorCode::invalid_argument, "max_attempt_factor must be positive");
  }
}

ShuffleResult nm1_shuffle(const SocialGraph& g, const ShuffleConfig& cfg) {
  require_swappable(g, cfg);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  EdgeSet present(edges);
  const Budget budget = make_budget(cfg, edges.size());
  Rng rng(cfg.seed);

  const std::uint64_t m = edges.size();
  std::uint64_t performed = 0;
  std::uint64_t proposals = 0;
  while (performed < budget.target && proposals < budget.max_proposals) {
    ++proposals;
    const std::uint64_t i = rng.below(m);
    std::uint64_t j = rng.below(m - 1);
    if (j >= i) ++j;
    const NodeIndex a = edges[i].u;
    const NodeIndex b = edges[i].v;
    NodeIndex c = edges[j].u;
    NodeIndex d = edges[j].v;
    if (rng.coin()) std::swap(c, d);
    // (a,b),(c,d) -> (a,c),(b,d)
    if (a == c || b == d) continue;
    if (present.contains(a, c) || present.contains(b, d)) continue;
    present.replace(a, b, a, c);
    present.replace(c, d, b, d);
    edges[i] = {a, c};
    edges[j] = {b, d};
    ++performed;
  }
  return finish(g, std::move(edges), budget, performed, proposals);
}

ShuffleResult nm2_shuffle(const SocialGraph& g, const ShuffleConfig& cfg) {
  require_swappable(g, cfg);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  EdgeSet present(edges);
  const Budget budget = make_budget(cfg, edges.size());
  Rng rng(cfg.seed);

  // An edge end ("stub") is position 2e + side. Swaps exchange two nodes of
  // equal degree between stubs, so the degree seen at every stub is fixed
  // and the per-degree stub lists never change.
  const std::vector<std::size_t> degree = g.degrees();
  auto node_at = [&](std::uint64_t stub) -> NodeIndex& {
    Edge& e = edges[stub >> 1];
    return (stub & 1) ? e.v : e.u;
  };

  std::size_t max_degree = 0;
  for (std::size_t k : degree) max_degree = std::max(max_degree, k);
  std::vector<std::size_t> nodes_with_degree(max_degree + 1, 0);
  for (std::size_t k : degree) ++nodes_with_degree[k];

  std::vector<std::vector<std::uint64_t>> stubs_by_degree(max_degree + 1);
  std::vector<std::uint64_t> eligible;
  for (std::uint64_t s = 0; s < 2 * edges.size(); ++s) {
    const std::size_t k = degree[node_at(s)];
    stubs_by_degree[k].push_back(s);
    if (nodes_with_degree[k] > 1) eligible.push_back(s);
  }
  std::uint64_t skipped = 0;
  for (const Edge& e : edges) {
    if (nodes_with_degree[degree[e.u]] == 1 && nodes_with_degree[degree[e.v]] == 1) ++skipped;
  }

  std::uint64_t performed = 0;
  std::uint64_t proposals = 0;
  while (!eligible.empty() && performed < budget.target && proposals < budget.max_proposals) {
    ++proposals;
    const std::uint64_t s1 = eligible[rng.below(eligible.size())];
    const NodeIndex a = node_at(s1);
    const auto& candidates = stubs_by_degree[degree[a]];
    const std::uint64_t s2 = candidates[rng.below(candidates.size())];
    if ((s1 >> 1) == (s2 >> 1)) continue;
    const NodeIndex c = node_at(s2);
    if (a == c) continue;
    const NodeIndex b = node_at(s1 ^ 1);
    const NodeIndex d = node_at(s2 ^ 1);
    // (a,b),(c,d) -> (c,b),(a,d)
    if (c == b || a == d) continue;
    if (present.contains(c, b) || present.contains(a, d)) continue;
    present.replace(a, b, c, b);
    present.replace(c, d, a, d);
    node_at(s1) = c;
    node_at(s2) = a;
    ++performed;
  }
  ShuffleResult r = finish(g, std::move(edges), budget, performed, proposals);
  r.skipped_edges = skipped;
  return r;
}

ShuffleResult shuffle(const SocialGraph& g, const ShuffleConfig& cfg) {
  return cfg.model == NullModel::nm1 ? nm1_shuffle(g, cfg) : nm2_shuffle(g, cfg);
}

// --- ensemble ----------------------------------------------------------------------

std::size_t NullEnsembleStats::warning_count() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.exhausted ? 1 : 0;
  return n;
}

const StatisticSummary& NullEnsembleStats::statistic(const std::string& name) const {
  for (const auto& s : statistics) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::invalid_argument, "ensemble has no statistic '" + name + "'");
}

std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t index) {
  return derive_seed(base_seed, index);
}

NullEnsembleStats run_ensemble(const SocialGraph& g, const ShuffleConfig& cfg,
                               const EnsembleOptions& options,
                               std::span<const GraphStatistic> statistics) {
  const std::size_t R = options.realizations;
  if (R == 0) throw Error(ErrorCode::invalid_argument, "ensemble: realizations must be >= 1");
  cfg.validate();

  NullEnsembleStats out;
  out.config = cfg;
  out.realizations = R;
  out.seeds.resize(R);
  for (std::size_t i = 0; i < R; ++i) out.seeds[i] = realization_seed(cfg.seed, i);
  out.runs.resize(R);

  // values[i][s] is statistic s evaluated on realization i.
  std::vector<std::vector<std::vector<double>>> values(R);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= R) return;
      try {
        ShuffleConfig c = cfg;
        c.seed = out.seeds[i];
        ShuffleResult res = shuffle(g, c);
        out.runs[i] = {c.seed, res.performed_swaps, res.proposals, res.skipped_edges,
                       res.exhausted};
        values[i].reserve(statistics.size());
        for (const GraphStatistic& s : statistics) values[i].push_back(s.evaluate(res.graph));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(R);
        return;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(R)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t warnings = out.warning_count();
  if (static_cast<double>(warnings) > options.max_warning_fraction * static_cast<double>(R)) {
    throw Error(ErrorCode::ensemble_warning_rate,
                std::to_string(warnings) + " of " + std::to_string(R) +
                    " realizations exhausted their swap budget");
  }

  for (std::size_t s = 0; s < statistics.size(); ++s) {
    const std::size_t len = values[0][s].size();
    StatisticSummary summary{statistics[s].name, std::vector<double>(len, 0.0),
                             std::vector<double>(len, 0.0)};
    for (std::size_t i = 0; i < R; ++i) {
      if (values[i][s].size() != len) {
        throw Error(ErrorCode::invalid_argument,
                    "ensemble: statistic '" + statistics[s].name + "' changed length");
      }
    }
    for (std::size_t k = 0; k < len; ++k) {
      // Mean as offset from the first realization: exact when every
      // realization agrees, and summed in realization order.
      const double ref = values[0][s][k];
      double dev = 0.0;
      for (std::size_t i = 0; i < R; ++i) dev += values[i][s][k] - ref;
      const double mean = ref + dev / static_cast<double>(R);
      double ss = 0.0;
      for (std::size_t i = 0; i < R; ++i) {
        const double d = values[i][s][k] - mean;
        ss += d * d;
      }
      summary.mean[k] = mean;
      summary.standard_error[k] =
          R > 1 ? std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R)) : 0.0;
    }
    out.statistics.push_back(std::move(summary));
  }
  return out;
}

}  // namespace socnet
