#include "socnet/geo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "socnet/econometrics.hpp"
#include "socnet/error.hpp"
#include "socnet/graph.hpp"

namespace socnet {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr std::int64_t kSecondsPerDay = 86400;

// 1970-01-01 was a Thursday; with Monday = 0 that is weekday 3.
int weekday(std::int64_t local_seconds) {
  std::int64_t day = local_seconds / kSecondsPerDay;
  if (local_seconds % kSecondsPerDay < 0) --day;
  return static_cast<int>(((day + 3) % 7 + 7) % 7);
}

int hour_of_day(std::int64_t local_seconds) {
  std::int64_t s = local_seconds % kSecondsPerDay;
  if (s < 0) s += kSecondsPerDay;
  return static_cast<int>(s / 3600);
}

std::int64_t local_time(std::int64_t timestamp, const TimeWindows& w) {
  return timestamp + static_cast<std::int64_t>(w.utc_offset_hours) * 3600;
}

struct CellTally {
  std::size_t count = 0;
  std::int64_t first_seen = 0;
  std::size_t first_order = 0;
};

std::optional<GeoPoint> modal_cell(const std::map<std::pair<double, double>, CellTally>& tally,
                                   std::size_t min_appearances) {
  const CellTally* best = nullptr;
  const std::pair<double, double>* best_key = nullptr;
  for (const auto& [key, t] : tally) {
    const bool better =
        best == nullptr || t.count > best->count ||
        (t.count == best->count &&
         (t.first_seen < best->first_seen ||
          (t.first_seen == best->first_seen && t.first_order < best->first_order)));
    if (better) {
      best = &t;
      best_key = &key;
    }
  }
  if (best == nullptr || best->count < min_appearances) return std::nullopt;
  return GeoPoint{best_key->first, best_key->second};
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon > -180.0 && p.lon <= 180.0;
}

void validate(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw Error(ErrorCode::invalid_argument,
                "coordinate out of range: (" + std::to_string(p.lat) + ", " +
                    std::to_string(p.lon) + ")");
  }
}

double haversine(const GeoPoint& a, const GeoPoint& b) {
  validate(a);
  validate(b);
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_rad, double distance_km) {
  validate(origin);
  const double delta = distance_km / kEarthRadiusKm;
  const double phi1 = origin.lat * kDegToRad;
  const double lambda1 = origin.lon * kDegToRad;
  const double sin_phi2 = std::sin(phi1) * std::cos(delta) +
                          std::cos(phi1) * std::sin(delta) * std::cos(bearing_rad);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * sin_phi2);
  double lon = std::fmod(lambda2 * kRadToDeg + 540.0, 360.0) - 180.0;
  if (lon <= -180.0) lon += 360.0;
  return {phi2 * kRadToDeg, lon};
}

// --- home / work ------------------------------------------------------------------

bool in_home_window(std::int64_t timestamp, const TimeWindows& w) {
  const std::int64_t t = local_time(timestamp, w);
  if (weekday(t) >= 5) return true;
  const int h = hour_of_day(t);
  return h >= w.night_start || h < w.night_end;
}

bool in_work_window(std::int64_t timestamp, const TimeWindows& w) {
  const std::int64_t t = local_time(timestamp, w);
  if (weekday(t) >= 5) return false;
  const int h = hour_of_day(t);
  return h >= w.work_start && h < w.work_end;
}

HomeWork infer_home_work(std::span<const LocatedEvent> events, const TimeWindows& windows) {
  std::map<std::pair<double, double>, CellTally> home, work;
  auto count = [](auto& tally, const LocatedEvent& ev, std::size_t order) {
    auto [it, inserted] = tally.try_emplace({ev.cell.lat, ev.cell.lon});
    CellTally& t = it->second;
    if (inserted || ev.timestamp < t.first_seen) {
      t.first_seen = ev.timestamp;
      t.first_order = order;
    }
    ++t.count;
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    const LocatedEvent& ev = events[i];
    if (!is_valid(ev.cell)) continue;
    if (in_home_window(ev.timestamp, windows)) count(home, ev, i);
    if (in_work_window(ev.timestamp, windows)) count(work, ev, i);
  }
  return {modal_cell(home, windows.min_appearances), modal_cell(work, windows.min_appearances)};
}

// --- class distances --------------------------------------------------------------

ClassDistances class_distance_matrix(const SocialGraph& g, const ClassPartition& partition,
                                     std::span<const std::optional<GeoPoint>> locations) {
  if (partition.assignment.size() != g.node_count() || locations.size() != g.node_count()) {
    throw Error(ErrorCode::invalid_argument,
                "class_distance_matrix: partition or locations do not cover the graph");
  }
  const std::size_t n = partition.n;
  Matrix<double> sum(n, n, 0.0);
  ClassDistances out{Matrix<double>(n, n, 0.0), Matrix<std::uint64_t>(n, n, 0)};
  for (const Edge& e : g.edges()) {
    const auto& lu = locations[e.u];
    const auto& lv = locations[e.v];
    if (!lu || !lv) continue;
    const std::uint32_t cu = partition.assignment[e.u];
    const std::uint32_t cv = partition.assignment[e.v];
    if (cu >= n || cv >= n) {
      throw Error(ErrorCode::invalid_argument, "class_distance_matrix: node without class");
    }
    const double d = haversine(*lu, *lv);
    sum(cu, cv) += d;
    ++out.located_links(cu, cv);
    if (cu != cv) {
      sum(cv, cu) += d;
      ++out.located_links(cv, cu);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto links = out.located_links(i, j);
      out.mean_km(i, j) =
          links == 0 ? std::nan("") : sum(i, j) / static_cast<double>(links);
    }
  }
  return out;
}

Matrix<double> relative_distance_matrix(const Matrix<double>& mean_km,
                                        const Matrix<std::uint64_t>& link_counts) {
  if (mean_km.rows() != link_counts.rows() || mean_km.cols() != link_counts.cols()) {
    throw Error(ErrorCode::invalid_argument, "relative_distance_matrix: shape mismatch");
  }
  Matrix<double> out(mean_km.rows(), mean_km.cols(), std::nan(""));
  for (std::size_t i = 0; i < mean_km.rows(); ++i) {
    double weighted = 0.0;
    double weight = 0.0;
    for (std::size_t j = 0; j < mean_km.cols(); ++j) {
      if (!std::isfinite(mean_km(i, j)) || link_counts(i, j) == 0) continue;
      const auto w = static_cast<double>(link_counts(i, j));
      weighted += w * mean_km(i, j);
      weight += w;
    }
    if (weight == 0.0) continue;
    const double row_mean = weighted / weight;
    if (!(row_mean > 0.0)) continue;
    for (std::size_t j = 0; j < mean_km.cols(); ++j) {
      if (!std::isfinite(mean_km(i, j))) continue;
      out(i, j) = (mean_km(i, j) - row_mean) / row_mean;
    }
  }
  return out;
}

// --- commuting ------------------------------------------------------------------------

std::size_t CommuteBins::index_of(double km) const {
  if (km <= 0.0) return 0;
  // Bin 0 is [0, 0]; log bins are [lo, hi) with the extremes absorbing
  // out-of-range values.
  const auto first = lo.begin() + 1;
  auto it = std::upper_bound(first, lo.end(), km);
  if (it == first) return 1;
  return static_cast<std::size_t>(it - lo.begin()) - 1;
}

CommuteBins make_commute_bins(std::size_t log_bins, double min_km, double max_km) {
  if (log_bins == 0 || !(min_km > 0.0) || !(max_km > min_km)) {
    throw Error(ErrorCode::invalid_argument, "commute bins: need log_bins >= 1 and 0 < min < max");
  }
  CommuteBins b;
  b.lo.push_back(0.0);
  b.hi.push_back(0.0);
  const double step = std::log(max_km / min_km) / static_cast<double>(log_bins);
  for (std::size_t i = 0; i < log_bins; ++i) {
    b.lo.push_back(i == 0 ? min_km : min_km * std::exp(step * static_cast<double>(i)));
    b.hi.push_back(i + 1 == log_bins ? max_km
                                     : min_km * std::exp(step * static_cast<double>(i + 1)));
  }
  return b;
}

CommuteDeltaTable commute_delta(std::span<const HomeWork> homework,
                                const ClassPartition& partition, const CommuteBins& bins) {
  if (homework.size() != partition.assignment.size()) {
    throw Error(ErrorCode::invalid_argument, "commute_delta: locations do not match partition");
  }
  const std::size_t n = partition.n;
  const std::size_t nb = bins.size();
  std::vector<std::uint64_t> all(nb, 0);
  std::vector<std::vector<std::uint64_t>> per_class(n, std::vector<std::uint64_t>(nb, 0));

  CommuteDeltaTable t;
  t.bins = bins;
  t.commuters.assign(n, 0);
  for (std::size_t v = 0; v < homework.size(); ++v) {
    const HomeWork& hw = homework[v];
    if (!hw.home || !hw.work) continue;
    const std::uint32_t c = partition.assignment[v];
    if (c >= n) throw Error(ErrorCode::invalid_argument, "commute_delta: node without class");
    const std::size_t bin = bins.index_of(haversine(*hw.home, *hw.work));
    ++all[bin];
    ++per_class[c][bin];
    ++t.commuters[c];
    ++t.total_commuters;
  }
  if (t.total_commuters == 0) {
    throw Error(ErrorCode::insufficient_data, "commute_delta: nobody has both home and work");
  }

  const auto total = static_cast<double>(t.total_commuters);
  t.p_all.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) t.p_all[b] = static_cast<double>(all[b]) / total;

  t.p_class.resize(n);
  t.delta.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (t.commuters[c] == 0) continue;
    const auto size = static_cast<double>(t.commuters[c]);
    t.p_class[c].resize(nb);
    t.delta[c].resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      t.p_class[c][b] = static_cast<double>(per_class[c][b]) / size;
      t.delta[c][b] = t.p_class[c][b] - t.p_all[b];
    }
  }
  return t;
}

}  // namespace socnet
