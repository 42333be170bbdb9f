#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "socnet/matrix.hpp"

namespace socnet {

class SocialGraph;
struct ClassPartition;

inline constexpr double kEarthRadiusKm = 6371.0;

/// Latitude in [-90, 90], longitude in (-180, 180], both in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;
/// Throws Error(invalid_argument) when `p` is outside the coordinate bounds.
void validate(const GeoPoint& p);

/// Great-circle distance in km on a sphere of radius kEarthRadiusKm.
double haversine(const GeoPoint& a, const GeoPoint& b);

/// Point reached from `origin` after `distance_km` along initial bearing
/// `bearing_rad` (clockwise from north) on the same sphere.
GeoPoint destination_point(const GeoPoint& origin, double bearing_rad,
                           double distance_km);

// --- home / work inference -------------------------------------------------

/// Hour windows used to classify located events. Hours are local:
/// timestamp + utc_offset_hours. The home window is [night_start, 24) plus
/// [0, night_end) on any day, plus all of Saturday and Sunday; the work
/// window is [work_start, work_end) Monday to Friday.
struct TimeWindows {
  int night_start = 22;
  int night_end = 7;
  int work_start = 9;
  int work_end = 17;
  int utc_offset_hours = 0;
  std::size_t min_appearances = 10;
};

struct LocatedEvent {
  std::int64_t timestamp = 0;
  GeoPoint cell;
};

struct HomeWork {
  std::optional<GeoPoint> home;
  std::optional<GeoPoint> work;
};

bool in_home_window(std::int64_t timestamp, const TimeWindows& w);
bool in_work_window(std::int64_t timestamp, const TimeWindows& w);

/// Home is the most frequent cell in the home window, work the most frequent
/// cell in the work window. A location is reported only when its modal cell
/// has at least `min_appearances` events; ties go to the cell seen first.
HomeWork infer_home_work(std::span<const LocatedEvent> events,
                         const TimeWindows& windows = {});

// --- class distance matrices -----------------------------------------------

struct ClassDistances {
  /// Mean zip-to-zip distance over linked pairs; NaN where no located link.
  Matrix<double> mean_km;
  /// Number of links with both endpoints located, per class pair.
  Matrix<std::uint64_t> located_links;
};

/// Mean geodesic distance between linked egos per class pair. Edges with an
/// unlocated endpoint are left out. The result is symmetric.
ClassDistances class_distance_matrix(const SocialGraph& g,
                                     const ClassPartition& partition,
                                     std::span<const std::optional<GeoPoint>> locations);

/// Relative deviation of each class-pair distance from the row's
/// link-weighted mean distance. Not symmetric. Undefined (NaN) inputs give
/// undefined outputs and are left out of the row mean.
Matrix<double> relative_distance_matrix(const Matrix<double>& mean_km,
                                        const Matrix<std::uint64_t>& link_counts);

// --- commuting -------------------------------------------------------------

/// Histogram bins for commuting distances. Bin 0 holds exactly-zero
/// commutes; the remaining bins are logarithmic between min_km and max_km.
/// Values below min_km fall into the first log bin, above max_km into the
/// last.
struct CommuteBins {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const noexcept { return lo.size(); }
  std::size_t index_of(double km) const;
};

CommuteBins make_commute_bins(std::size_t log_bins = 30, double min_km = 0.1,
                              double max_km = 1000.0);

struct CommuteDeltaTable {
  CommuteBins bins;
  std::vector<double> p_all;
  /// Per-class distribution and delta; empty vectors for classes without
  /// commuters.
  std::vector<std::vector<double>> p_class;
  std::vector<std::vector<double>> delta;
  std::vector<std::size_t> commuters;
  std::size_t total_commuters = 0;
};

/// Commuting distance distributions per class minus the population
/// distribution. `homework` is indexed by node. Throws when nobody has
/// both locations.
CommuteDeltaTable commute_delta(std::span<const HomeWork> homework,
                                const ClassPartition& partition,
                                const CommuteBins& bins = make_commute_bins());

}  // namespace socnet
