#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "socnet/error.hpp"
#include "socnet/nullmodels.hpp"
#include "socnet/random.hpp"
#include "socnet/stratify.hpp"
#include "socnet/synthgen.hpp"

using namespace socnet;

namespace {

SocialGraph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j) e.push_back({i, j});
  }
  return SocialGraph(n, e);
}

SocialGraph ring_lattice(std::size_t n, std::size_t half_degree) {
  std::vector<Edge> e;
  for (NodeIndex i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= half_degree; ++k) {
      const auto j = static_cast<NodeIndex>((i + k) % n);
      e.push_back({std::min(i, j), std::max(i, j)});
    }
  }
  return SocialGraph(n, e);
}

SocialGraph synthetic(std::size_t n, std::size_t m, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_nodes = n;
  cfg.n_edges = m;
  cfg.seed = seed;
  return generate_society(cfg).graph;
}

void check_simple(const SocialGraph& g) {
  for (const Edge& e : g.edges()) CHECK(e.u != e.v);
  CHECK(oracle::edge_set(g.edges()).size() == g.edge_count());
}

}  // namespace

TEST_SUITE("nullmodels") {
  TEST_CASE("complete graph admits no swap") {
    const auto k5 = complete(5);
    for (NullModel model : {NullModel::nm1, NullModel::nm2}) {
      ShuffleConfig cfg;
      cfg.model = model;
      cfg.max_attempt_factor = 10;
      const auto res = shuffle(k5, cfg);
      CHECK(res.graph == k5);
      CHECK(res.performed_swaps == 0);
      CHECK(res.exhausted);
      CHECK(res.proposals == 10 * res.target_swaps);
    }
  }

  TEST_CASE("two disjoint edges rewire into one of the two legal pairings") {
    const SocialGraph g(4, {{0, 1}, {2, 3}});
    const SocialGraph ac(4, {{0, 2}, {1, 3}});
    const SocialGraph ad(4, {{0, 3}, {1, 2}});
    std::set<int> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      ShuffleConfig cfg;
      cfg.swap_multiplier = 0.5;  // exactly one swap
      cfg.seed = seed;
      const auto res = nm1_shuffle(g, cfg);
      CHECK(res.performed_swaps == 1);
      const bool is_ac = res.graph == ac, is_ad = res.graph == ad;
      CHECK((is_ac || is_ad));
      seen.insert(is_ac ? 0 : 1);
      CHECK(res.graph.degrees() == std::vector<std::size_t>{1, 1, 1, 1});
    }
    CHECK(seen.size() == 2);
  }

  TEST_CASE("both shuffles preserve the degree sequence on a synthetic graph") {
    const auto g = synthetic(2000, 10000, 4);
    for (NullModel model : {NullModel::nm1, NullModel::nm2}) {
      ShuffleConfig cfg;
      cfg.model = model;
      cfg.seed = 99;
      const auto res = shuffle(g, cfg);
      CHECK(res.performed_swaps == 5 * g.edge_count());
      CHECK_FALSE(res.exhausted);
      CHECK(res.graph.node_count() == g.node_count());
      CHECK(res.graph.edge_count() == g.edge_count());
      CHECK(res.graph.degrees() == g.degrees());
      check_simple(res.graph);
    }
  }

  TEST_CASE("nm2 preserves the endpoint-degree pair multiset") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto g = synthetic(300 + 50 * seed, 900 + 100 * seed, seed);
      ShuffleConfig cfg;
      cfg.model = NullModel::nm2;
      cfg.seed = seed;
      const auto res = nm2_shuffle(g, cfg);
      CHECK(oracle::degree_pairs(res.graph) == oracle::degree_pairs(g));
      CHECK(knn_curve(res.graph) == knn_curve(g));
      CHECK(degree_assortativity(res.graph).r == degree_assortativity(g).r);
      check_simple(res.graph);
    }
  }

  TEST_CASE("nm2 on a regular graph mixes like nm1") {
    const auto g = ring_lattice(200, 3);
    ShuffleConfig cfg;
    cfg.model = NullModel::nm2;
    cfg.seed = 3;
    const auto r2 = nm2_shuffle(g, cfg);
    cfg.model = NullModel::nm1;
    const auto r1 = nm1_shuffle(g, cfg);
    CHECK(r2.skipped_edges == 0);
    CHECK(r2.performed_swaps == r1.performed_swaps);
    CHECK(r2.graph.degrees() == g.degrees());
    CHECK_FALSE(r2.graph == g);
    // A lattice edge joins nodes at ring distance <= 3; few survive mixing.
    std::size_t local = 0;
    for (const Edge& e : r2.graph.edges()) {
      const auto d = std::min<std::size_t>(e.v - e.u, 200 - (e.v - e.u));
      local += d <= 3;
    }
    CHECK(local < g.edge_count() / 10);
  }

  TEST_CASE("nm2 reports edges between unique degrees") {
    // degrees: 0 -> 1, 1 -> 3, 2 -> 2, 3 -> 2; edge (0,1) joins two unique degrees
    const SocialGraph g(4, {{0, 1}, {1, 2}, {2, 3}, {1, 3}});
    ShuffleConfig cfg;
    cfg.model = NullModel::nm2;
    cfg.max_attempt_factor = 4;
    const auto res = nm2_shuffle(g, cfg);
    CHECK(res.skipped_edges == 1);
  }

  TEST_CASE("shuffles are deterministic per seed") {
    const auto g = synthetic(500, 2000, 8);
    for (NullModel model : {NullModel::nm1, NullModel::nm2}) {
      ShuffleConfig cfg;
      cfg.model = model;
      cfg.seed = 1234;
      CHECK(shuffle(g, cfg).graph == shuffle(g, cfg).graph);
      ShuffleConfig other = cfg;
      other.seed = 1235;
      CHECK_FALSE(shuffle(g, cfg).graph == shuffle(g, other).graph);
    }
  }

  TEST_CASE("config validation") {
    ShuffleConfig cfg;
    cfg.swap_multiplier = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK(parse_null_model("nm2") == NullModel::nm2);
    CHECK_THROWS_AS(parse_null_model("nm3"), Error);
    CHECK_THROWS_AS(nm1_shuffle(SocialGraph(2, {{0, 1}}), ShuffleConfig{}), Error);
  }

  TEST_CASE("realization seeds are individually reproducible") {
    CHECK(realization_seed(7, 3) == derive_seed(7, 3));
    CHECK(realization_seed(7, 3) != realization_seed(7, 4));
    CHECK(realization_seed(7, 3) != realization_seed(8, 3));
  }

  TEST_CASE("a single realization reproduces the direct statistic") {
    const auto g = synthetic(400, 1600, 2);
    const GraphStatistic stats[] = {{"first_edge", [](const SocialGraph& h) {
                                       return std::vector<double>{static_cast<double>(h.edges()[0].v)};
                                     }}};
    ShuffleConfig cfg;
    cfg.seed = 77;
    EnsembleOptions opt;
    opt.realizations = 1;
    const auto ens = run_ensemble(g, cfg, opt, stats);
    ShuffleConfig single = cfg;
    single.seed = realization_seed(cfg.seed, 0);
    const auto direct = shuffle(g, single).graph;
    CHECK(ens.statistic("first_edge").mean[0] == static_cast<double>(direct.edges()[0].v));
    CHECK(ens.statistic("first_edge").standard_error[0] == 0.0);
    CHECK(ens.seeds == std::vector<std::uint64_t>{single.seed});
    CHECK_THROWS_AS(ens.statistic("missing"), Error);
  }

  TEST_CASE("ensembles are reproducible and independent of thread count") {
    const auto g = synthetic(600, 3000, 12);
    ClassPartition p = partition_equal_wealth(std::vector<double>(600, 1.0), 3);
    const GraphStatistic stats[] = {class_link_statistic(p)};
    ShuffleConfig cfg;
    cfg.seed = 5;
    EnsembleOptions opt;
    opt.realizations = 12;
    const auto a = run_ensemble(g, cfg, opt, stats);
    const auto b = run_ensemble(g, cfg, opt, stats);
    opt.threads = 3;
    const auto c = run_ensemble(g, cfg, opt, stats);
    CHECK(a.statistic(kClassLinksStatistic).mean == b.statistic(kClassLinksStatistic).mean);
    CHECK(a.statistic(kClassLinksStatistic).mean == c.statistic(kClassLinksStatistic).mean);
    CHECK(a.statistic(kClassLinksStatistic).standard_error == c.statistic(kClassLinksStatistic).standard_error);
    CHECK(a.seeds == c.seeds);
  }

  TEST_CASE("ensemble mean does not depend on realization order") {
    const auto g = synthetic(300, 1200, 13);
    std::vector<std::vector<double>> per_run;
    const GraphStatistic stats[] = {{"knn8", [](const SocialGraph& h) {
                                       const auto k = knn_curve(h);
                                       return std::vector<double>{k.count(8) ? k.at(8) : 0.0};
                                     }}};
    ShuffleConfig cfg;
    cfg.seed = 21;
    EnsembleOptions opt;
    opt.realizations = 15;
    const auto ens = run_ensemble(g, cfg, opt, stats);
    std::vector<double> values;
    for (std::size_t i = 0; i < 15; ++i) {
      ShuffleConfig c = cfg;
      c.seed = realization_seed(cfg.seed, i);
      values.push_back(stats[0].evaluate(shuffle(g, c).graph)[0]);
    }
    Rng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
      for (std::size_t i = values.size() - 1; i > 0; --i) std::swap(values[i], values[rng.below(i + 1)]);
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / 15.0;
      CHECK(ens.statistic("knn8").mean[0] == doctest::Approx(mean).epsilon(1e-12));
    }
  }

  TEST_CASE("too many exhausted realizations fail the ensemble") {
    const auto k5 = complete(5);
    ShuffleConfig cfg;
    cfg.max_attempt_factor = 2;
    EnsembleOptions opt;
    opt.realizations = 5;
    try {
      run_ensemble(k5, cfg, opt, {});
      FAIL("expected an ensemble warning-rate error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ensemble_warning_rate);
    }
  }

  TEST_CASE("mean class links match the configuration-model expectation") {
    SynthConfig sc;
    sc.n_nodes = 5000;
    sc.n_edges = 25000;
    sc.pareto_alpha = 3.0;
    sc.n_classes = 4;
    sc.seed = 31;
    const auto s = generate_society(sc);
    const GraphStatistic stats[] = {class_link_statistic(s.classes)};
    ShuffleConfig cfg;
    cfg.seed = 8;
    EnsembleOptions opt;
    opt.realizations = 100;
    const auto ens = run_ensemble(s.graph, cfg, opt, stats);
    const Matrix<double> mean = mean_class_links(ens, 4);
    const auto& se = ens.statistic(kClassLinksStatistic).standard_error;

    // Stub matching: k_i k_j / (2|E|) between classes, k_i^2 / (4|E|) within.
    std::vector<double> stubs(4, 0.0);
    for (NodeIndex v = 0; v < s.graph.node_count(); ++v) {
      stubs[s.classes.assignment[v]] += static_cast<double>(s.graph.degree(v));
    }
    const double two_e = 2.0 * static_cast<double>(s.graph.edge_count());
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double expected = i == j ? stubs[i] * stubs[i] / (2.0 * two_e) : stubs[i] * stubs[j] / two_e;
        CHECK(std::abs(mean(i, j) - expected) <= 3.0 * se[i * 4 + j]);
      }
    }
  }
}
