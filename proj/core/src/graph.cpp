#include "socnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "socnet/error.hpp"

namespace socnet {

namespace {

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

// --- DirectedInteractionGraph ------------------------------------------------

DirectedInteractionGraph::DirectedInteractionGraph(std::vector<std::string> ids,
                                                   std::vector<Edge> arcs)
    : ids_(std::move(ids)), arcs_(std::move(arcs)) {
  for (const Edge& a : arcs_) {
    if (a.u == a.v) {
      throw Error(ErrorCode::invalid_argument, "directed graph: self-arc");
    }
    if (a.u >= ids_.size() || a.v >= ids_.size()) {
      throw Error(ErrorCode::invalid_argument, "directed graph: arc endpoint out of range");
    }
  }
  sort_unique(arcs_);
}

// --- SocialGraph ---------------------------------------------------------------

SocialGraph::SocialGraph(std::size_t node_count, std::vector<Edge> edges,
                         std::vector<std::string> ids)
    : node_count_(node_count), edges_(std::move(edges)), ids_(std::move(ids)) {
  if (!ids_.empty() && ids_.size() != node_count_) {
    throw Error(ErrorCode::invalid_argument, "graph: id count does not match node count");
  }
  if (node_count_ >= std::numeric_limits<NodeIndex>::max()) {
    throw Error(ErrorCode::invalid_argument, "graph: too many nodes");
  }
  for (Edge& e : edges_) {
    if (e.u == e.v) throw Error(ErrorCode::invalid_argument, "graph: self-loop");
    if (e.u >= node_count_ || e.v >= node_count_) {
      throw Error(ErrorCode::invalid_argument, "graph: edge endpoint out of range");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error(ErrorCode::invalid_argument, "graph: duplicate edge");
  }

  offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // One pass in canonical order leaves every neighbor list sorted: node x
  // first receives the u of each edge (u, x), u < x, in ascending u, then
  // the v of each edge (x, v) in ascending v.
  for (const Edge& e : edges_) {
    adjacency_[cursor[e.u]++] = e.v;
    adjacency_[cursor[e.v]++] = e.u;
  }
}

std::vector<std::size_t> SocialGraph::degrees() const {
  std::vector<std::size_t> out(node_count_);
  for (std::size_t v = 0; v < node_count_; ++v) out[v] = offsets_[v + 1] - offsets_[v];
  return out;
}

bool SocialGraph::has_edge(NodeIndex u, NodeIndex v) const {
  if (u >= node_count_ || v >= node_count_) return false;
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::string SocialGraph::id(NodeIndex v) const {
  return ids_.empty() ? std::to_string(v) : ids_[v];
}

// --- construction --------------------------------------------------------------

DirectedInteractionGraph build_interaction_graph(std::span<const EventRecord> events) {
  std::unordered_map<std::string_view, NodeIndex> index;
  std::vector<std::string> ids;
  std::vector<Edge> arcs;
  arcs.reserve(events.size());

  auto intern = [&](const std::string& id) {
    auto [it, inserted] = index.try_emplace(id, static_cast<NodeIndex>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
  };

  // Ids are interned only for events that survive, so a node exists only
  // if it has at least one arc.
  for (const EventRecord& ev : events) {
    if (ev.caller == ev.callee) continue;
    const NodeIndex a = intern(ev.caller);
    const NodeIndex b = intern(ev.callee);
    arcs.push_back({a, b});
  }
  if (ids.empty()) {
    throw Error(ErrorCode::empty_graph, "no events between distinct users");
  }
  return DirectedInteractionGraph(std::move(ids), std::move(arcs));
}

DirectedInteractionGraph recursive_activity_filter(const DirectedInteractionGraph& g) {
  const std::size_t n = g.node_count();
  const auto arcs = g.arcs();
  std::vector<std::size_t> in(n, 0), out(n, 0);
  std::vector<std::vector<NodeIndex>> succ(n), pred(n);
  for (const Edge& a : arcs) {
    ++out[a.u];
    ++in[a.v];
    succ[a.u].push_back(a.v);
    pred[a.v].push_back(a.u);
  }

  std::vector<char> removed(n, 0);
  std::deque<NodeIndex> queue;
  for (NodeIndex v = 0; v < n; ++v) {
    if (in[v] == 0 || out[v] == 0) {
      removed[v] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const NodeIndex v = queue.front();
    queue.pop_front();
    for (NodeIndex w : succ[v]) {
      if (removed[w]) continue;
      if (--in[w] == 0) {
        removed[w] = 1;
        queue.push_back(w);
      }
    }
    for (NodeIndex w : pred[v]) {
      if (removed[w]) continue;
      if (--out[w] == 0) {
        removed[w] = 1;
        queue.push_back(w);
      }
    }
  }

  std::vector<NodeIndex> remap(n, 0);
  std::vector<std::string> ids;
  for (NodeIndex v = 0; v < n; ++v) {
    if (removed[v]) continue;
    remap[v] = static_cast<NodeIndex>(ids.size());
    ids.push_back(g.ids()[v]);
  }
  std::vector<Edge> kept;
  for (const Edge& a : arcs) {
    if (!removed[a.u] && !removed[a.v]) kept.push_back({remap[a.u], remap[a.v]});
  }
  return DirectedInteractionGraph(std::move(ids), std::move(kept));
}

SocialGraph undirect_and_simplify(const DirectedInteractionGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.arc_count());
  for (const Edge& a : g.arcs()) {
    edges.push_back(a.u < a.v ? a : Edge{a.v, a.u});
  }
  sort_unique(edges);
  return SocialGraph(g.node_count(), std::move(edges),
                     std::vector<std::string>(g.ids().begin(), g.ids().end()));
}

// --- components ------------------------------------------------------------------

Components connected_components(const SocialGraph& g) {
  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  Components c;
  c.label.assign(g.node_count(), kUnseen);
  std::vector<NodeIndex> stack;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (c.label[s] != kUnseen) continue;
    const auto id = static_cast<std::uint32_t>(c.sizes.size());
    std::size_t size = 0;
    c.label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeIndex v = stack.back();
      stack.pop_back();
      ++size;
      for (NodeIndex w : g.neighbors(v)) {
        if (c.label[w] == kUnseen) {
          c.label[w] = id;
          stack.push_back(w);
        }
      }
    }
    c.sizes.push_back(size);
  }
  return c;
}

SocialGraph largest_component(const SocialGraph& g) {
  if (g.node_count() == 0) {
    throw Error(ErrorCode::empty_graph, "largest_component: empty graph");
  }
  const Components c = connected_components(g);
  // max_element returns the first maximum, i.e. the lowest label, which is
  // the component containing the smallest node index.
  const auto best = static_cast<std::uint32_t>(
      std::max_element(c.sizes.begin(), c.sizes.end()) - c.sizes.begin());
  std::vector<NodeIndex> keep;
  keep.reserve(c.sizes[best]);
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (c.label[v] == best) keep.push_back(v);
  }
  return induce_subgraph(g, keep);
}

SocialGraph induce_subgraph(const SocialGraph& g, std::span<const NodeIndex> keep) {
  if (keep.empty()) {
    throw Error(ErrorCode::invalid_argument, "induce_subgraph: empty node selection");
  }
  constexpr NodeIndex kDropped = std::numeric_limits<NodeIndex>::max();
  std::vector<NodeIndex> remap(g.node_count(), kDropped);
  for (NodeIndex v : keep) {
    if (v >= g.node_count()) {
      throw Error(ErrorCode::invalid_argument, "induce_subgraph: node index out of range");
    }
    remap[v] = 0;
  }
  std::vector<std::string> ids;
  NodeIndex next = 0;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (remap[v] == kDropped) continue;
    remap[v] = next++;
    if (!g.ids().empty()) ids.push_back(g.ids()[v]);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (remap[e.u] != kDropped && remap[e.v] != kDropped) {
      edges.push_back({remap[e.u], remap[e.v]});
    }
  }
  return SocialGraph(next, std::move(edges), std::move(ids));
}

// --- degree statistics --------------------------------------------------------------

// Both functions below accumulate integer degree sums exactly, so their
// results depend only on the multiset of endpoint-degree pairs and not on
// edge order.
Correlation degree_assortativity(const SocialGraph& g) {
  if (g.edge_count() < 2) {
    throw Error(ErrorCode::insufficient_data, "assortativity: need at least two edges");
  }
  __extension__ typedef __int128 i128;
  // Sums over both orientations of every edge; x and y share their marginals.
  i128 sx = 0, sxx = 0, sxy = 0;
  for (const Edge& e : g.edges()) {
    const i128 du = g.degree(e.u), dv = g.degree(e.v);
    sx += du + dv;
    sxx += du * du + dv * dv;
    sxy += 2 * du * dv;
  }
  const i128 m = 2 * static_cast<i128>(g.edge_count());
  const i128 cov = m * sxy - sx * sx;
  const i128 var = m * sxx - sx * sx;
  if (var == 0) {
    throw Error(ErrorCode::undefined_correlation, "assortativity: all endpoint degrees are equal");
  }
  Correlation c;
  c.n = static_cast<std::size_t>(m);
  c.r = std::clamp(static_cast<double>(static_cast<long double>(cov) / static_cast<long double>(var)), -1.0, 1.0);
  c.p_value = pearson_p_value(c.r, c.n);
  c.standard_error = std::sqrt((1.0 - c.r * c.r) / static_cast<double>(c.n - 2));
  return c;
}

std::map<std::size_t, double> knn_curve(const SocialGraph& g) {
  // knn(k) = sum of neighbor degrees over degree-k nodes / (k * N_k).
  std::map<std::size_t, std::pair<std::uint64_t, std::uint64_t>> acc;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    const std::size_t k = g.degree(v);
    if (k == 0) continue;
    std::uint64_t sum = 0;
    for (NodeIndex w : g.neighbors(v)) sum += g.degree(w);
    auto& [total, count] = acc[k];
    total += sum;
    ++count;
  }
  std::map<std::size_t, double> out;
  for (const auto& [k, tc] : acc) {
    out.emplace(k, static_cast<double>(tc.first) / (static_cast<double>(k) * static_cast<double>(tc.second)));
  }
  return out;
}

DegreeStats degree_stats(const SocialGraph& g) {
  DegreeStats s;
  s.degrees = g.degrees();
  s.knn = knn_curve(g);
  try {
    s.assortativity = degree_assortativity(g);
  } catch (const Error&) {
    s.assortativity.reset();
  }
  return s;
}

}  // namespace socnet
