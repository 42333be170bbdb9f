// Naive reference implementations used as test oracles. They share no code
// with the library beyond the plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "socnet/econometrics.hpp"
#include "socnet/geo.hpp"
#include "socnet/graph.hpp"
#include "socnet/matrix.hpp"

namespace oracle {

using socnet::Edge;
using socnet::GeoPoint;
using socnet::Matrix;
using socnet::NodeIndex;

inline std::set<std::pair<NodeIndex, NodeIndex>> edge_set(std::span<const Edge> edges) {
  std::set<std::pair<NodeIndex, NodeIndex>> s;
  for (const Edge& e : edges) s.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
  return s;
}

/// Every unordered node pair is tested against the edge set.
inline Matrix<std::uint64_t> class_links(std::size_t n_nodes, std::span<const Edge> edges,
                                         std::span<const std::uint32_t> cls, std::size_t n) {
  const auto s = edge_set(edges);
  Matrix<std::uint64_t> m(n, n, 0);
  for (NodeIndex i = 0; i < n_nodes; ++i) {
    for (NodeIndex j = i + 1; j < n_nodes; ++j) {
      if (!s.count({i, j})) continue;
      const auto a = cls[i], b = cls[j];
      if (a == b) {
        ++m(a, a);
      } else {
        ++m(a, b);
        ++m(b, a);
      }
    }
  }
  return m;
}

/// Central angle from the dot and cross products of unit vectors.
inline double great_circle_km(const GeoPoint& p, const GeoPoint& q) {
  const double d = M_PI / 180.0;
  const double ax = std::cos(p.lat * d) * std::cos(p.lon * d), ay = std::cos(p.lat * d) * std::sin(p.lon * d),
               az = std::sin(p.lat * d);
  const double bx = std::cos(q.lat * d) * std::cos(q.lon * d), by = std::cos(q.lat * d) * std::sin(q.lon * d),
               bz = std::sin(q.lat * d);
  const double cx = ay * bz - az * by, cy = az * bx - ax * bz, cz = ax * by - ay * bx;
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  const double dot = ax * bx + ay * by + az * bz;
  return 6371.0 * std::atan2(cross, dot);
}

inline Matrix<double> class_distances(std::span<const Edge> edges, std::span<const std::uint32_t> cls,
                                      std::span<const GeoPoint> where, std::size_t n) {
  Matrix<double> sum(n, n, 0.0);
  Matrix<double> count(n, n, 0.0);
  for (const Edge& e : edges) {
    const double km = great_circle_km(where[e.u], where[e.v]);
    sum(cls[e.u], cls[e.v]) += km;
    count(cls[e.u], cls[e.v]) += 1;
    if (cls[e.u] != cls[e.v]) {
      sum(cls[e.v], cls[e.u]) += km;
      count(cls[e.v], cls[e.u]) += 1;
    }
  }
  Matrix<double> mean(n, n, std::nan(""));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (count(i, j) > 0) mean(i, j) = sum(i, j) / count(i, j);
    }
  }
  return mean;
}

struct Density {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edges;
  std::vector<double> phi;
};

/// For each step, removes the poorest individuals one at a time until the
/// removed wealth reaches s/segments of the total, then counts surviving
/// edges by scanning the edge list.
inline Density residual_density(std::size_t n_nodes, std::span<const Edge> edges,
                                std::span<const double> amp, std::size_t segments) {
  std::vector<NodeIndex> order(n_nodes);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
    return amp[a] != amp[b] ? amp[a] < amp[b] : a < b;
  });
  double total = 0.0;
  for (double x : amp) total += x;
  Density out;
  for (std::size_t s = 0; s < segments; ++s) {
    const double target = total * static_cast<double>(s) / static_cast<double>(segments);
    std::vector<bool> alive(n_nodes, true);
    double removed = 0.0;
    std::size_t k = 0;
    while (k < n_nodes && removed < target) {
      removed += amp[order[k]];
      alive[order[k]] = false;
      ++k;
    }
    const std::size_t nodes = n_nodes - k;
    std::size_t m = 0;
    for (const Edge& e : edges) m += alive[e.u] && alive[e.v];
    out.nodes.push_back(nodes);
    out.edges.push_back(m);
    out.phi.push_back(nodes < 2 ? std::nan("")
                                : 2.0 * static_cast<double>(m) /
                                      (static_cast<double>(nodes) * static_cast<double>(nodes - 1)));
  }
  return out;
}

inline std::map<std::size_t, double> knn(std::size_t n_nodes, std::span<const Edge> edges) {
  std::vector<std::vector<NodeIndex>> adj(n_nodes);
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  for (NodeIndex v = 0; v < n_nodes; ++v) {
    if (adj[v].empty()) continue;
    double s = 0.0;
    for (NodeIndex w : adj[v]) s += static_cast<double>(adj[w].size());
    auto& a = acc[adj[v].size()];
    a.first += s / static_cast<double>(adj[v].size());
    ++a.second;
  }
  std::map<std::size_t, double> out;
  for (const auto& [k, a] : acc) out[k] = a.first / static_cast<double>(a.second);
  return out;
}

/// Gini by the mean absolute difference, O(N log N) via sorted ranks.
inline double gini_mean_difference(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double weighted = 0.0, total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
    total += x[i];
  }
  return weighted / (n * total);
}

/// Root of f -> g(f) on [lo, hi] by bisection; g must change sign.
template <typename F>
double bisect(F g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((g(lo) < 0) == (g(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Pareto Lorenz curve L(F) = 1 - (1 - F)^(1 - 1/alpha) meets C = 1 - F.
/// Returns (top_people, top_wealth).
inline std::pair<double, double> pareto_lorenz_split(double alpha) {
  const double f = bisect([&](double x) { return 1.0 - std::pow(1.0 - x, 1.0 - 1.0 / alpha) - (1.0 - x); },
                          1e-12, 1.0 - 1e-12);
  return {1.0 - f, f};
}

/// Sorted multiset of (min degree, max degree) over edges.
inline std::vector<std::pair<std::size_t, std::size_t>> degree_pairs(const socnet::SocialGraph& g) {
  std::vector<std::size_t> deg(g.node_count(), 0);
  for (const Edge& e : g.edges()) {
    ++deg[e.u];
    ++deg[e.v];
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const Edge& e : g.edges()) out.emplace_back(std::min(deg[e.u], deg[e.v]), std::max(deg[e.u], deg[e.v]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
