#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlg/vertex_set.hpp"

namespace rlg {

/// Raised for malformed graph input: bad builder specs, loops, parallel
/// edges, disconnected graphs, unknown edges or labels.
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

inline constexpr Distance kInfiniteGirth = std::numeric_limits<Distance>::max();

/// Immutable simple connected undirected graph with labels and all-pairs
/// hop distances computed at construction.
class Graph {
 public:
  /// Validates and builds. Edges may be given in any order and orientation.
  static Graph from_edges(std::vector<std::string> labels, std::span<const Edge> edges);

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::string& label(Vertex v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Vertex> find_label(std::string_view label) const;
  /// Resolves a label, or a decimal vertex index when no label matches.
  Vertex resolve(std::string_view label_or_index) const;

  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  bool adjacent(Vertex u, Vertex v) const { return distance(u, v) == 1; }
  Distance distance(Vertex u, Vertex v) const { return distances_[u * vertex_count() + v]; }
  Distance eccentricity(Vertex v) const { return static_cast<Distance>(layers_.at(v).size() - 1); }

  /// Edges with u < v, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  /// N[v] as a bit-set.
  const VertexSet& closed_neighborhood(Vertex v) const { return closed_nbhd_.at(v); }
  /// distance_layers(v)[d] is the set of vertices at distance d from v.
  const std::vector<VertexSet>& distance_layers(Vertex v) const { return layers_.at(v); }

  VertexSet all_vertices() const { return VertexSet::full(vertex_count()); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.labels_ == b.labels_ && a.edges_ == b.edges_;
  }

 private:
  Graph() = default;

  std::vector<std::string> labels_;
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<Distance> distances_;
  std::vector<VertexSet> closed_nbhd_;
  std::vector<std::vector<VertexSet>> layers_;
};

/// One subdivision path of G^(1/m). internal[i] sits at distance i+1 from
/// endpoint_u along the thread.
struct Thread {
  Vertex endpoint_u = 0;
  Vertex endpoint_v = 0;
  std::vector<Vertex> internal;
};

/// A vertex of a subdivided graph named by thread and offset from
/// endpoint_u (0 and m are the endpoints themselves).
struct ThreadPoint {
  std::size_t thread = 0;
  std::size_t offset = 0;
  friend bool operator==(const ThreadPoint&, const ThreadPoint&) = default;
};

/// Bookkeeping for G^(1/m): which vertices are original and how the threads
/// run. Vertex indices refer to the subdivided graph; original vertex i of
/// the base graph keeps index i.
class SubdivisionMap {
 public:
  SubdivisionMap(std::size_t base_vertex_count, std::size_t m, std::vector<Thread> threads);

  std::size_t base_vertex_count() const { return base_vertex_count_; }
  std::size_t m() const { return m_; }
  const std::vector<Thread>& threads() const { return threads_; }
  bool is_original(Vertex v) const { return v < base_vertex_count_; }
  VertexSet original_vertices(std::size_t universe) const;

  /// Thread joining two original vertices, if the base edge exists.
  std::optional<std::size_t> thread_between(Vertex a, Vertex b) const;
  /// Vertex at `offset` from `from` along the thread joining `from` and `to`.
  Vertex vertex_on(Vertex from, Vertex to, std::size_t offset) const;
  Vertex vertex_at(ThreadPoint p) const;
  /// Thread coordinates of an internal vertex; nullopt for originals.
  std::optional<ThreadPoint> locate(Vertex v) const;

  /// Central vertex of the thread (m even only).
  std::optional<Vertex> midpoint(std::size_t thread) const;
  /// The two vertices of the central edge (m odd only), nearer endpoint_u first.
  std::optional<std::pair<Vertex, Vertex>> near_midpoints(std::size_t thread) const;

 private:
  std::size_t base_vertex_count_;
  std::size_t m_;
  std::vector<Thread> threads_;
  std::vector<ThreadPoint> internal_index_;  // by (v - base_vertex_count)
};

struct SubdividedGraph {
  Graph graph;
  SubdivisionMap map;
};

/// A graph built from a family descriptor, with subdivision metadata when
/// the descriptor asked for one.
struct BuiltGraph {
  std::string spec;
  Graph graph;
  std::optional<SubdivisionMap> subdivision;
};

/// Family descriptors: K:n, Kab:a,b, C:n, P:n, H, Hprime, Petersen, Heawood,
/// edges:0-1,1-2,... ; any of them may carry a "/m" suffix, which replaces
/// every edge by a thread of length m (e.g. "K:6/3").
BuiltGraph build_named(std::string_view spec);
/// build_named(spec) followed by subdivide(·, m) when m > 1.
BuiltGraph build_named(std::string_view spec, std::size_t m);
/// Vertex count build_named(spec) would produce, without building it
/// (saturates instead of overflowing). Throws GraphError on a bad spec.
std::size_t named_vertex_count(std::string_view spec);

Graph complete_graph(std::size_t n);
Graph complete_bipartite(std::size_t a, std::size_t b);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph graph_h();
Graph graph_h_prime();
Graph petersen_graph();
Graph heawood_graph();

/// Replaces every edge by a path of length m. Original vertices keep their
/// indices; internal vertices follow in edge order and are labelled
/// "u-v/i" with the lower-indexed endpoint first.
SubdividedGraph subdivide(const Graph& g, std::size_t m);

/// Replaces the edge by a path through k new vertices.
Graph subdivide_edge(const Graph& g, Edge e, std::size_t k);

/// Length of a shortest cycle, or kInfiniteGirth for forests.
Distance girth(const Graph& g);

struct BipartiteCheck {
  bool bipartite = false;
  std::vector<int> coloring;       // 0/1 per vertex when bipartite
  std::vector<Vertex> odd_cycle;   // closed walk v0..vk (v0 adjacent to vk) otherwise
};
BipartiteCheck check_bipartite(const Graph& g);
inline bool is_bipartite(const Graph& g) { return check_bipartite(g).bipartite; }

/// Checks a witness returned by check_bipartite against the graph.
bool bipartite_witness_valid(const Graph& g, const BipartiteCheck& check);

nlohmann::json graph_to_json(const Graph& g);
/// {"base_vertex_count", "m", "original_vertices", "threads": [{"endpoint_u",
/// "endpoint_v", "internal_vertices"}]}
nlohmann::json subdivision_to_json(const SubdivisionMap& map);
Graph graph_from_json(const nlohmann::json& j);
std::string graph_to_dot(const Graph& g, std::string_view name = "G");

}  // namespace rlg
