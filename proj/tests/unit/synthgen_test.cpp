#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stat_oracles.hpp"
#include "socnet/error.hpp"
#include "socnet/stratify.hpp"
#include "socnet/synthgen.hpp"

using namespace socnet;

namespace {

// A cell counts toward the flatness check once a 10% deviation is three
// Poisson standard deviations of its expected link count.
constexpr double kFlatnessFloor = (3.0 / 0.10) * (3.0 / 0.10);

StratMatrix stratify(const SyntheticSociety& s, std::size_t realizations, double floor) {
  const GraphStatistic stats[] = {class_link_statistic(s.classes)};
  ShuffleConfig sc;
  sc.seed = 77;
  EnsembleOptions opt;
  opt.realizations = realizations;
  const auto ens = run_ensemble(s.graph, sc, opt, stats);
  return stratification_matrix(class_link_matrix(s.graph, s.classes), mean_class_links(ens, s.classes.n), floor);
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("pareto wealth has the analytic gini") {
    for (const auto& [alpha, expected] : {std::pair{1.5, 0.5}, std::pair{3.0, 0.2}}) {
      SynthConfig cfg;
      cfg.n_nodes = 100000;
      cfg.pareto_alpha = alpha;
      cfg.seed = 9;
      const auto w = sample_wealth(cfg);
      CHECK(std::abs(gini(lorenz_curve(w)) - expected) <= 0.02);
      CHECK(*std::min_element(w.begin(), w.end()) >= cfg.wealth_min);
    }
  }

  TEST_CASE("wealth samples are reproducible per seed") {
    SynthConfig cfg;
    cfg.n_nodes = 1000;
    cfg.seed = 5;
    CHECK(sample_wealth(cfg) == sample_wealth(cfg));
    SynthConfig other = cfg;
    other.seed = 6;
    CHECK(sample_wealth(cfg) != sample_wealth(other));
  }

  TEST_CASE("uncoupled placement is independent of class") {
    SynthConfig cfg;
    cfg.n_nodes = 10000;
    cfg.class_cluster_coupling = 0.0;
    cfg.seed = 3;
    const auto classes = partition_equal_wealth(sample_wealth(cfg), cfg.n_classes);
    const auto p = place_population(cfg, classes);
    std::vector<std::vector<double>> table(cfg.n_classes, std::vector<double>(cfg.spatial_clusters, 0.0));
    for (std::size_t v = 0; v < cfg.n_nodes; ++v) table[classes.assignment[v]][p.cluster[v]] += 1.0;
    CHECK(oracle::chi_square_independence(table) > 0.01);
  }

  TEST_CASE("fully coupled placement uses only the class's own clusters") {
    SynthConfig cfg;
    cfg.n_nodes = 3000;
    cfg.spatial_clusters = 27;
    cfg.class_cluster_coupling = 1.0;
    cfg.seed = 4;
    const auto classes = partition_equal_wealth(sample_wealth(cfg), cfg.n_classes);
    const auto p = place_population(cfg, classes);
    for (std::size_t v = 0; v < cfg.n_nodes; ++v) CHECK(p.cluster[v] % cfg.n_classes == classes.assignment[v]);
  }

  TEST_CASE("zero dispersion puts cluster members on the center") {
    SynthConfig cfg;
    cfg.n_nodes = 500;
    cfg.cluster_dispersion_km = 0.0;
    cfg.seed = 5;
    const auto classes = partition_equal_wealth(sample_wealth(cfg), cfg.n_classes);
    const auto p = place_population(cfg, classes);
    for (std::size_t v = 0; v < cfg.n_nodes; ++v) CHECK(p.position[v] == p.centers[p.cluster[v]]);
  }

  TEST_CASE("generated graphs are simple with the requested size") {
    SynthConfig cfg;
    cfg.n_nodes = 800;
    cfg.n_edges = 5000;
    cfg.homophily = 1.5;
    cfg.rich_club_boost = 4.0;
    cfg.seed = 6;
    const auto s = generate_society(cfg);
    CHECK(s.graph.node_count() == 800);
    CHECK(s.graph.edge_count() == 5000);
    CHECK(oracle::edge_set(s.graph.edges()).size() == 5000);
    for (const Edge& e : s.graph.edges()) CHECK(e.u != e.v);
    CHECK(s.graph.ids()[7] == "u007");
    const auto again = generate_society(cfg);
    CHECK(again.graph == s.graph);
    CHECK(again.wealth == s.wealth);
    CHECK(again.work == s.work);
  }

  TEST_CASE("independent graphs stratify flat against their own shuffles") {
    SynthConfig cfg;
    cfg.n_nodes = 10000;
    cfg.n_edges = 50000;
    cfg.seed = 7;
    const auto s = generate_society(cfg);
    const auto L = stratify(s, 20, kFlatnessFloor);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t j = 0; j < 9; ++j) {
        if (!L.reliable(i, j)) continue;
        ++checked;
        CHECK(L.ratio(i, j) >= 0.9);
        CHECK(L.ratio(i, j) <= 1.1);
      }
    }
    CHECK(checked >= 9);
  }

  TEST_CASE("strong homophily puts weight on the diagonal") {
    SynthConfig cfg;
    cfg.n_nodes = 10000;
    cfg.n_edges = 50000;
    cfg.homophily = 2.0;
    cfg.seed = 8;
    const auto L = stratify(generate_society(cfg), 10, 1.0);
    double diag = 0, off = 0;
    std::size_t nd = 0, no = 0;
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t j = 0; j < 9; ++j) {
        if (!L.reliable(i, j)) continue;
        (i == j ? diag : off) += L.ratio(i, j);
        ++(i == j ? nd : no);
      }
    }
    CHECK(diag / static_cast<double>(nd) > off / static_cast<double>(no));
  }

  TEST_CASE("boosted rich pairs form a rich club") {
    SynthConfig cfg;
    cfg.n_nodes = 1000;
    cfg.n_edges = 60000;
    cfg.rich_club_boost = 10.0;
    cfg.rich_fraction = 0.01;
    cfg.seed = 9;
    const auto s = generate_society(cfg);
    const auto schedule = make_removal_schedule(s.wealth, 100);
    const GraphStatistic stats[] = {density_statistic(schedule)};
    ShuffleConfig sc;
    sc.seed = 1;
    EnsembleOptions opt;
    opt.realizations = 5;
    const auto ens = run_ensemble(s.graph, sc, opt, stats);
    const auto curve = assemble_rich_club(residual_density(s.graph, schedule), ens.statistic(kDensityStatistic));
    // Top thresholds: the last defined steps, where only the richest remain.
    std::size_t last = curve.rho.size();
    while (last > 0 && std::isnan(curve.rho[last - 1])) --last;
    REQUIRE(last > 0);
    CHECK(curve.nodes_remaining[last - 1] <= 10);
    CHECK(curve.rho[last - 1] >= 3.0);
  }

  TEST_CASE("uncoupled commutes do not depend on class") {
    SynthConfig cfg;
    cfg.n_nodes = 10000;
    cfg.pareto_alpha = 3.0;
    cfg.commute_class_coupling = 0.0;
    cfg.seed = 10;
    const auto classes = partition_equal_wealth(sample_wealth(cfg), cfg.n_classes);
    const auto homes = place_population(cfg, classes).position;
    const auto work = assign_commutes(cfg, classes, homes);
    std::vector<std::vector<double>> per_class(cfg.n_classes);
    std::vector<double> all;
    for (std::size_t v = 0; v < homes.size(); ++v) {
      const double km = haversine(homes[v], work[v]);
      per_class[classes.assignment[v]].push_back(km);
      all.push_back(km);
    }
    for (const auto& c : per_class) {
      CHECK(oracle::ks_statistic(c, all) < oracle::ks_critical(c.size(), all.size(), 0.01));
    }
  }

  TEST_CASE("coupled commutes grow with class") {
    SynthConfig cfg;
    cfg.n_nodes = 5000;
    cfg.commute_class_coupling = 1.0;
    cfg.seed = 11;
    const auto classes = partition_equal_wealth(sample_wealth(cfg), cfg.n_classes);
    const auto homes = place_population(cfg, classes).position;
    const auto work = assign_commutes(cfg, classes, homes);
    CHECK(work == assign_commutes(cfg, classes, homes));
    std::vector<double> cls, km;
    for (std::size_t v = 0; v < homes.size(); ++v) {
      cls.push_back(classes.assignment[v]);
      km.push_back(haversine(homes[v], work[v]));
    }
    CHECK(oracle::spearman(cls, km) > 0.2);
  }

  TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.n_nodes = 10;
    cfg.n_edges = 46;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.n_edges = 45;
    CHECK_NOTHROW(cfg.validate());
    cfg.pareto_alpha = 1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.pareto_alpha = 2.0;
    cfg.commute_class_coupling = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.commute_class_coupling = 0.0;
    cfg.rich_club_boost = 0.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}
