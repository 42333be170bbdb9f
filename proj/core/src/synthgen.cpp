#include "socnet/synthgen.hpp"

#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <numbers>
#include <numeric>

#include "socnet/error.hpp"
#include "socnet/random.hpp"

namespace socnet {

namespace {

// Every generator step draws from its own stream so that changing one step
// does not perturb the others.
enum Stream : std::uint64_t { kWealth = 1, kPlacement = 2, kGraph = 3, kCommute = 4 };

Rng stream(const SynthConfig& cfg, Stream s) { return Rng(derive_seed(cfg.seed, s)); }

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, std::string("synth config: ") + what);
}

std::string node_name(std::size_t v, std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::string digits = std::to_string(v);
  return "u" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

GeoPoint scatter(Rng& rng, const GeoPoint& center, double sigma_km) {
  if (sigma_km <= 0.0) return center;
  const double east = sigma_km * rng.normal();
  const double north = sigma_km * rng.normal();
  const double dist = std::hypot(east, north);
  if (dist == 0.0) return center;
  return destination_point(center, std::atan2(east, north), dist);
}

}  // namespace

void SynthConfig::validate() const {
  require(n_nodes >= 2, "n_nodes must be >= 2");
  const double max_edges = 0.5 * static_cast<double>(n_nodes) * static_cast<double>(n_nodes - 1);
  require(static_cast<double>(n_edges) <= max_edges, "n_edges exceeds n_nodes(n_nodes-1)/2");
  require(pareto_alpha > 1.0 && std::isfinite(pareto_alpha), "pareto_alpha must be > 1");
  require(wealth_min > 0.0, "wealth_min must be positive");
  require(n_classes >= 1 && n_classes <= n_nodes, "n_classes must be in [1, n_nodes]");
  require(homophily >= 0.0 && std::isfinite(homophily), "homophily must be >= 0");
  require(rich_club_boost >= 1.0 && std::isfinite(rich_club_boost), "rich_club_boost must be >= 1");
  require(rich_fraction > 0.0 && rich_fraction <= 1.0, "rich_fraction must be in (0, 1]");
  require(spatial_clusters >= 1, "spatial_clusters must be >= 1");
  require(cluster_dispersion_km >= 0.0, "cluster_dispersion_km must be >= 0");
  require(class_cluster_coupling >= 0.0 && class_cluster_coupling <= 1.0,
          "class_cluster_coupling must be in [0, 1]");
  require(commute_class_coupling >= -1.0 && commute_class_coupling <= 1.0,
          "commute_class_coupling must be in [-1, 1]");
  require(commute_median_km > 0.0 && commute_sigma >= 0.0, "commute parameters out of range");
  require(is_valid({region_lat_min, region_lon_min}) && is_valid({region_lat_max, region_lon_max}) &&
              region_lat_min < region_lat_max && region_lon_min < region_lon_max,
          "invalid region");
}

std::vector<double> sample_wealth(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng = stream(cfg, kWealth);
  std::vector<double> w(cfg.n_nodes);
  const double inv_alpha = 1.0 / cfg.pareto_alpha;
  for (double& x : w) x = cfg.wealth_min * std::pow(rng.uniform_open_low(), -inv_alpha);
  return w;
}

Placement place_population(const SynthConfig& cfg, const ClassPartition& classes) {
  cfg.validate();
  if (classes.assignment.size() != cfg.n_nodes) {
    throw Error(ErrorCode::invalid_argument, "place_population: partition size mismatch");
  }
  Rng rng = stream(cfg, kPlacement);
  Placement p;

  // Centers are kept apart by several dispersions where the region allows,
  // so clusters stay spatially distinct.
  const double min_separation = 6.0 * cfg.cluster_dispersion_km;
  while (p.centers.size() < cfg.spatial_clusters) {
    GeoPoint candidate;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      candidate = {cfg.region_lat_min + rng.uniform() * (cfg.region_lat_max - cfg.region_lat_min),
                   cfg.region_lon_min + rng.uniform() * (cfg.region_lon_max - cfg.region_lon_min)};
      const bool clear = std::all_of(p.centers.begin(), p.centers.end(), [&](const GeoPoint& c) {
        return haversine(c, candidate) >= min_separation;
      });
      if (clear) break;
    }
    p.centers.push_back(candidate);
  }

  std::vector<std::vector<std::uint32_t>> owned(classes.n);
  for (std::uint32_t j = 0; j < cfg.spatial_clusters; ++j) owned[j % classes.n].push_back(j);

  p.cluster.resize(cfg.n_nodes);
  p.position.resize(cfg.n_nodes);
  for (std::size_t v = 0; v < cfg.n_nodes; ++v) {
    const auto& own = owned[classes.assignment[v]];
    const bool coupled = rng.uniform() < cfg.class_cluster_coupling;
    const std::uint32_t j = (coupled && !own.empty())
                                ? own[rng.below(own.size())]
                                : static_cast<std::uint32_t>(rng.below(cfg.spatial_clusters));
    p.cluster[v] = j;
    p.position[v] = scatter(rng, p.centers[j], cfg.cluster_dispersion_km);
  }
  return p;
}

SocialGraph generate_graph(const SynthConfig& cfg, const ClassPartition& classes,
                           std::span<const double> wealth) {
  cfg.validate();
  const std::size_t n = cfg.n_nodes;
  if (classes.assignment.size() != n || wealth.size() != n) {
    throw Error(ErrorCode::invalid_argument, "generate_graph: partition or wealth size mismatch");
  }
  Rng rng = stream(cfg, kGraph);

  std::vector<char> rich(n, 0);
  if (cfg.rich_club_boost > 1.0) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return wealth[a] > wealth[b] || (wealth[a] == wealth[b] && a < b);
    });
    const auto top = static_cast<std::size_t>(std::ceil(cfg.rich_fraction * static_cast<double>(n)));
    for (std::size_t i = 0; i < std::min(top, n); ++i) rich[order[i]] = 1;
  }

  // Weights by class distance, precomputed.
  std::vector<double> kernel(classes.n);
  for (std::size_t d = 0; d < classes.n; ++d) kernel[d] = std::exp(-cfg.homophily * static_cast<double>(d));
  const double w_max = cfg.rich_club_boost;

  absl::flat_hash_set<std::uint64_t> seen;
  seen.reserve(cfg.n_edges);
  std::vector<Edge> edges;
  edges.reserve(cfg.n_edges);
  const std::uint64_t max_proposals = 10000ULL * std::max<std::uint64_t>(cfg.n_edges, 1);
  std::uint64_t proposals = 0;
  while (edges.size() < cfg.n_edges) {
    if (++proposals > max_proposals) {
      throw Error(ErrorCode::invalid_argument, "generate_graph: edge budget infeasible");
    }
    auto u = static_cast<NodeIndex>(rng.below(n));
    auto v = static_cast<NodeIndex>(rng.below(n - 1));
    if (v >= u) ++v;
    const std::uint32_t cu = classes.assignment[u];
    const std::uint32_t cv = classes.assignment[v];
    double w = kernel[cu > cv ? cu - cv : cv - cu];
    if (rich[u] && rich[v]) w *= cfg.rich_club_boost;
    if (rng.uniform() * w_max >= w) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) continue;
    edges.push_back({u, v});
  }

  std::vector<std::string> ids(n);
  for (std::size_t v = 0; v < n; ++v) ids[v] = node_name(v, n);
  return SocialGraph(n, std::move(edges), std::move(ids));
}

std::vector<GeoPoint> assign_commutes(const SynthConfig& cfg, const ClassPartition& classes,
                                      std::span<const GeoPoint> homes) {
  cfg.validate();
  if (classes.assignment.size() != homes.size()) {
    throw Error(ErrorCode::invalid_argument, "assign_commutes: partition size mismatch");
  }
  Rng rng = stream(cfg, kCommute);
  std::vector<GeoPoint> work(homes.size());
  for (std::size_t v = 0; v < homes.size(); ++v) {
    const double scale =
        std::pow(static_cast<double>(classes.assignment[v] + 1), cfg.commute_class_coupling);
    const double km = cfg.commute_median_km * scale * std::exp(cfg.commute_sigma * rng.normal());
    const double bearing = 2.0 * std::numbers::pi * rng.uniform();
    work[v] = destination_point(homes[v], bearing, km);
  }
  return work;
}

SyntheticSociety generate_society(const SynthConfig& cfg) {
  SyntheticSociety s;
  s.wealth = sample_wealth(cfg);
  s.classes = partition_equal_wealth(s.wealth, cfg.n_classes);
  s.placement = place_population(cfg, s.classes);
  s.graph = generate_graph(cfg, s.classes, s.wealth);
  s.work = assign_commutes(cfg, s.classes, s.placement.position);
  return s;
}

}  // namespace socnet
