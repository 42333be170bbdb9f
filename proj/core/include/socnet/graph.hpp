#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socnet/geo.hpp"
#include "socnet/stats.hpp"

namespace socnet {

using NodeIndex = std::uint32_t;

/// A node pair. In a SocialGraph edges are stored with u < v; in a
/// DirectedInteractionGraph the pair is an arc u -> v.
struct Edge {
  NodeIndex u = 0;
  NodeIndex v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class EventKind { call, sms };

/// One communication event between two opaque user ids.
struct EventRecord {
  std::string caller;
  std::string callee;
  std::int64_t timestamp = 0;
  EventKind kind = EventKind::call;
  double duration = 0.0;
  std::optional<GeoPoint> cell;
};

/// Deduplicated arcs between users who communicated. Every listed id is a
/// node of the graph, including ids that are left without arcs.
class DirectedInteractionGraph {
 public:
  DirectedInteractionGraph() = default;
  /// Sorts and deduplicates `arcs`. Throws on self-arcs or indices outside
  /// `ids`.
  DirectedInteractionGraph(std::vector<std::string> ids, std::vector<Edge> arcs);

  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t arc_count() const noexcept { return arcs_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  std::span<const std::string> ids() const noexcept { return ids_; }
  std::span<const Edge> arcs() const noexcept { return arcs_; }

 private:
  std::vector<std::string> ids_;
  std::vector<Edge> arcs_;
};

/// Undirected simple graph over contiguous node indices 0..N-1.
///
/// Immutable after construction. Edges are kept in canonical order (sorted,
/// u < v) next to a CSR adjacency with sorted neighbor lists, so two graphs
/// with the same edge set compare equal and serialize identically.
class SocialGraph {
 public:
  SocialGraph() = default;
  /// Throws Error(invalid_argument) on self-loops, duplicate edges or
  /// indices >= node_count. `ids` is either empty or has node_count entries.
  SocialGraph(std::size_t node_count, std::vector<Edge> edges,
              std::vector<std::string> ids = {});

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::vector<std::size_t> degrees() const;
  bool has_edge(NodeIndex u, NodeIndex v) const;

  /// External id of node `v`; the decimal index when no ids were given.
  std::string id(NodeIndex v) const;
  std::span<const std::string> ids() const noexcept { return ids_; }

  bool operator==(const SocialGraph& other) const {
    return node_count_ == other.node_count_ && edges_ == other.edges_ &&
           ids_ == other.ids_;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> adjacency_;
  std::vector<std::string> ids_;
};

/// One arc per ordered pair that communicated at least once. Self-events
/// are dropped. Throws Error(empty_graph) when nothing remains.
DirectedInteractionGraph build_interaction_graph(std::span<const EventRecord> events);

/// Repeatedly removes nodes with zero in-degree or zero out-degree until
/// every remaining node both sent and received. May return an empty graph.
DirectedInteractionGraph recursive_activity_filter(const DirectedInteractionGraph& g);

/// Edge {u,v} iff arc (u,v) or (v,u) exists. Node set and ids are kept.
SocialGraph undirect_and_simplify(const DirectedInteractionGraph& g);

/// Component label per node plus the number of components. Labels are
/// assigned in order of each component's smallest node index.
struct Components {
  std::vector<std::uint32_t> label;
  std::vector<std::size_t> sizes;
};
Components connected_components(const SocialGraph& g);

/// Induced subgraph on the largest component; among equally large
/// components the one holding the smallest node index wins.
SocialGraph largest_component(const SocialGraph& g);

/// Induced subgraph on `keep`. Nodes keep their relative order and ids.
/// Throws on an empty or out-of-range selection.
SocialGraph induce_subgraph(const SocialGraph& g, std::span<const NodeIndex> keep);

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge. Throws Error(undefined_correlation) for regular graphs and
/// Error(insufficient_data) below two edges.
Correlation degree_assortativity(const SocialGraph& g);

/// Mean neighbor degree averaged over the nodes of each observed degree k.
/// Isolated nodes do not contribute.
std::map<std::size_t, double> knn_curve(const SocialGraph& g);

struct DegreeStats {
  std::vector<std::size_t> degrees;
  std::map<std::size_t, double> knn;
  std::optional<Correlation> assortativity;
};
DegreeStats degree_stats(const SocialGraph& g);

}  // namespace socnet
