#pragma once

#include <cstdint>
#include <vector>

#include "socnet/econometrics.hpp"
#include "socnet/geo.hpp"
#include "socnet/graph.hpp"

namespace socnet {

/// Parameters of a synthetic society with planted correlations.
struct SynthConfig {
  std::size_t n_nodes = 10000;
  std::size_t n_edges = 50000;
  double pareto_alpha = 1.5;
  double wealth_min = 1.0;
  std::size_t n_classes = 9;

  /// Edge acceptance weight exp(-homophily * |class(u) - class(v)|).
  double homophily = 0.0;
  /// Weight multiplier for pairs inside the richest `rich_fraction`.
  double rich_club_boost = 1.0;
  double rich_fraction = 0.01;

  std::size_t spatial_clusters = 9;
  double cluster_dispersion_km = 10.0;
  /// Probability of drawing the cluster from the class's own cluster set.
  double class_cluster_coupling = 0.0;
  double region_lat_min = 15.0;
  double region_lat_max = 30.0;
  double region_lon_min = -110.0;
  double region_lon_max = -88.0;

  /// Median commute is commute_median_km * (class index + 1)^coupling.
  double commute_class_coupling = 0.0;
  double commute_median_km = 5.0;
  double commute_sigma = 0.5;

  std::uint64_t seed = 1;

  void validate() const;
};

/// Independent Pareto(alpha, wealth_min) draws, one per node.
std::vector<double> sample_wealth(const SynthConfig& cfg);

struct Placement {
  std::vector<GeoPoint> centers;
  std::vector<std::uint32_t> cluster;
  std::vector<GeoPoint> position;
};

/// Cluster j is owned by class j mod n_classes. Each node draws its cluster
/// from its class's own set with probability class_cluster_coupling and
/// uniformly otherwise, then scatters around the center with isotropic
/// Gaussian noise of cluster_dispersion_km.
Placement place_population(const SynthConfig& cfg, const ClassPartition& classes);

/// Accept-reject sampling of n_edges distinct pairs with weight
/// exp(-h |dc|), times rich_club_boost inside the rich set. Node ids are
/// "u" followed by the zero-padded index.
SocialGraph generate_graph(const SynthConfig& cfg, const ClassPartition& classes,
                           std::span<const double> wealth);

/// Work location at a log-normal distance in a uniform direction from home.
std::vector<GeoPoint> assign_commutes(const SynthConfig& cfg, const ClassPartition& classes,
                                      std::span<const GeoPoint> homes);

struct SyntheticSociety {
  std::vector<double> wealth;
  ClassPartition classes;
  Placement placement;
  SocialGraph graph;
  std::vector<GeoPoint> work;
};

SyntheticSociety generate_society(const SynthConfig& cfg);

}  // namespace socnet
