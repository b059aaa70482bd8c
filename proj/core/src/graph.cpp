#include "rlg/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>

namespace rlg {

namespace {

constexpr Distance kUnreached = std::numeric_limits<Distance>::max();

std::vector<Distance> bfs(const std::vector<std::vector<Vertex>>& adj, Vertex source) {
  std::vector<Distance> dist(adj.size(), kUnreached);
  std::queue<Vertex> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const Vertex u = q.front();
    q.pop();
    for (Vertex w : adj[u]) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw GraphError("malformed " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

std::vector<std::string> numbered_labels(std::string_view prefix, std::size_t n, std::size_t start = 1) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(prefix) + std::to_string(i + start));
  return labels;
}

}  // namespace

Graph Graph::from_edges(std::vector<std::string> labels, std::span<const Edge> edges) {
  const std::size_t n = labels.size();
  if (n == 0) throw GraphError("graph must have at least one vertex");

  Graph g;
  g.labels_ = std::move(labels);
  g.adjacency_.assign(n, {});
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw GraphError("edge endpoint out of range");
    if (e.u == e.v) throw GraphError("loop at vertex " + std::to_string(e.u));
    g.edges_.push_back(Edge{std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  std::sort(g.edges_.begin(), g.edges_.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
  if (std::adjacent_find(g.edges_.begin(), g.edges_.end()) != g.edges_.end())
    throw GraphError("parallel edges are not allowed");
  for (const auto& e : g.edges_) {
    g.adjacency_[e.u].push_back(e.v);
    g.adjacency_[e.v].push_back(e.u);
  }
  for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.labels_[i] == g.labels_[j]) throw GraphError("duplicate vertex label '" + g.labels_[i] + "'");

  g.distances_.assign(n * n, 0);
  g.layers_.resize(n);
  g.closed_nbhd_.reserve(n);
  for (Vertex s = 0; s < n; ++s) {
    const auto dist = bfs(g.adjacency_, s);
    Distance ecc = 0;
    for (Vertex t = 0; t < n; ++t) {
      if (dist[t] == kUnreached) throw GraphError("graph is disconnected");
      g.distances_[s * n + t] = dist[t];
      ecc = std::max(ecc, dist[t]);
    }
    auto& layers = g.layers_[s];
    layers.assign(ecc + 1, VertexSet(n));
    for (Vertex t = 0; t < n; ++t) layers[dist[t]].insert(t);

    VertexSet closed(n);
    closed.insert(s);
    for (Vertex w : g.adjacency_[s]) closed.insert(w);
    g.closed_nbhd_.push_back(std::move(closed));
  }
  return g;
}

std::optional<Vertex> Graph::find_label(std::string_view label) const {
  for (Vertex v = 0; v < labels_.size(); ++v)
    if (labels_[v] == label) return v;
  return std::nullopt;
}

Vertex Graph::resolve(std::string_view label_or_index) const {
  if (auto v = find_label(label_or_index)) return *v;
  Vertex idx = 0;
  const auto* last = label_or_index.data() + label_or_index.size();
  auto [ptr, ec] = std::from_chars(label_or_index.data(), last, idx);
  if (ec == std::errc() && ptr == last && idx < vertex_count()) return idx;
  throw GraphError("unknown vertex '" + std::string(label_or_index) + "'");
}

// ---------------------------------------------------------------------------
// SubdivisionMap

SubdivisionMap::SubdivisionMap(std::size_t base_vertex_count, std::size_t m, std::vector<Thread> threads)
    : base_vertex_count_(base_vertex_count), m_(m), threads_(std::move(threads)) {
  for (std::size_t t = 0; t < threads_.size(); ++t) {
    if (threads_[t].internal.size() + 1 != m_) throw GraphError("thread has the wrong number of internal vertices");
    for (std::size_t i = 0; i < threads_[t].internal.size(); ++i) {
      const Vertex v = threads_[t].internal[i];
      if (v < base_vertex_count_) throw GraphError("internal vertex collides with an original vertex");
      const std::size_t slot = v - base_vertex_count_;
      if (internal_index_.size() <= slot) internal_index_.resize(slot + 1, ThreadPoint{SIZE_MAX, 0});
      internal_index_[slot] = ThreadPoint{t, i + 1};
    }
  }
}

VertexSet SubdivisionMap::original_vertices(std::size_t universe) const {
  VertexSet s(universe);
  for (Vertex v = 0; v < base_vertex_count_; ++v) s.insert(v);
  return s;
}

std::optional<std::size_t> SubdivisionMap::thread_between(Vertex a, Vertex b) const {
  for (std::size_t t = 0; t < threads_.size(); ++t) {
    const auto& th = threads_[t];
    if ((th.endpoint_u == a && th.endpoint_v == b) || (th.endpoint_u == b && th.endpoint_v == a)) return t;
  }
  return std::nullopt;
}

Vertex SubdivisionMap::vertex_at(ThreadPoint p) const {
  const auto& th = threads_.at(p.thread);
  if (p.offset == 0) return th.endpoint_u;
  if (p.offset == m_) return th.endpoint_v;
  if (p.offset > m_) throw GraphError("thread offset beyond thread length");
  return th.internal[p.offset - 1];
}

Vertex SubdivisionMap::vertex_on(Vertex from, Vertex to, std::size_t offset) const {
  const auto t = thread_between(from, to);
  if (!t) throw GraphError("no thread joins the two vertices");
  const auto& th = threads_[*t];
  return vertex_at(ThreadPoint{*t, th.endpoint_u == from ? offset : m_ - offset});
}

std::optional<ThreadPoint> SubdivisionMap::locate(Vertex v) const {
  if (v < base_vertex_count_) return std::nullopt;
  const std::size_t slot = v - base_vertex_count_;
  if (slot >= internal_index_.size() || internal_index_[slot].thread == SIZE_MAX) return std::nullopt;
  return internal_index_[slot];
}

std::optional<Vertex> SubdivisionMap::midpoint(std::size_t thread) const {
  if (m_ % 2 != 0) return std::nullopt;
  return vertex_at(ThreadPoint{thread, m_ / 2});
}

std::optional<std::pair<Vertex, Vertex>> SubdivisionMap::near_midpoints(std::size_t thread) const {
  if (m_ % 2 == 0) return std::nullopt;
  return std::pair{vertex_at(ThreadPoint{thread, m_ / 2}), vertex_at(ThreadPoint{thread, m_ / 2 + 1})};
}

// ---------------------------------------------------------------------------
// Families

Graph complete_graph(std::size_t n) {
  if (n < 2) throw GraphError("K:n requires n >= 2");
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) edges.push_back({i, j});
  return Graph::from_edges(numbered_labels("v", n), edges);
}

Graph complete_bipartite(std::size_t a, std::size_t b) {
  if (a < 1 || b < 1) throw GraphError("Kab:a,b requires a,b >= 1");
  auto labels = numbered_labels("a", a);
  for (auto& l : numbered_labels("b", b)) labels.push_back(std::move(l));
  std::vector<Edge> edges;
  for (Vertex i = 0; i < a; ++i)
    for (Vertex j = 0; j < b; ++j) edges.push_back({i, static_cast<Vertex>(a + j)});
  return Graph::from_edges(std::move(labels), edges);
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw GraphError("C:n requires n >= 3");
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i) edges.push_back({i, static_cast<Vertex>((i + 1) % n)});
  return Graph::from_edges(numbered_labels("", n, 0), edges);
}

Graph path_graph(std::size_t n) {
  if (n < 1) throw GraphError("P:n requires n >= 1");
  std::vector<Edge> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::from_edges(numbered_labels("", n, 0), edges);
}

Graph graph_h() {
  // cycle v1..v11 plus the chord v3v9
  std::vector<Edge> edges;
  for (Vertex i = 0; i < 11; ++i) edges.push_back({i, static_cast<Vertex>((i + 1) % 11)});
  edges.push_back({2, 8});
  return Graph::from_edges(numbered_labels("v", 11), edges);
}

Graph graph_h_prime() {
  const Graph h = graph_h();
  return subdivide_edge(h, Edge{4, 5}, 1);
}

Graph petersen_graph() {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < 5; ++i) {
    edges.push_back({i, static_cast<Vertex>((i + 1) % 5)});
    edges.push_back({i, i + 5});
    edges.push_back({i + 5, static_cast<Vertex>((i + 2) % 5 + 5)});
  }
  return Graph::from_edges(numbered_labels("", 10, 0), edges);
}

Graph heawood_graph() {
  // LCF notation [5,-5]^7
  std::vector<Edge> edges;
  for (Vertex i = 0; i < 14; ++i) {
    edges.push_back({i, static_cast<Vertex>((i + 1) % 14)});
    if (i % 2 == 0) edges.push_back({i, static_cast<Vertex>((i + 5) % 14)});
  }
  return Graph::from_edges(numbered_labels("", 14, 0), edges);
}

namespace {

Graph edge_list_graph(std::string_view body) {
  std::vector<Edge> edges;
  std::size_t max_vertex = 0;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const auto comma = body.find(',', pos);
    const auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) throw GraphError("malformed edge '" + std::string(item) + "'");
    const auto u = parse_count(item.substr(0, dash), "edge endpoint");
    const auto v = parse_count(item.substr(dash + 1), "edge endpoint");
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    max_vertex = std::max({max_vertex, u, v});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Graph::from_edges(numbered_labels("", max_vertex + 1, 0), edges);
}

Graph base_graph(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto head = spec.substr(0, colon);
  const auto body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const bool has_body = colon != std::string_view::npos;

  if (head == "H" && !has_body) return graph_h();
  if ((head == "Hprime" || head == "H'") && !has_body) return graph_h_prime();
  if (head == "Petersen" && !has_body) return petersen_graph();
  if (head == "Heawood" && !has_body) return heawood_graph();
  if (!has_body) throw GraphError("unknown graph family '" + std::string(spec) + "'");
  if (head == "K") return complete_graph(parse_count(body, "K:n parameter"));
  if (head == "C") return cycle_graph(parse_count(body, "C:n parameter"));
  if (head == "P") return path_graph(parse_count(body, "P:n parameter"));
  if (head == "Kab") {
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw GraphError("Kab expects 'Kab:a,b'");
    return complete_bipartite(parse_count(body.substr(0, comma), "Kab:a parameter"),
                              parse_count(body.substr(comma + 1), "Kab:b parameter"));
  }
  if (head == "edges") return edge_list_graph(body);
  throw GraphError("unknown graph family '" + std::string(head) + "'");
}

}  // namespace

BuiltGraph build_named(std::string_view spec) {
  const auto slash = spec.rfind('/');
  if (slash == std::string_view::npos) return BuiltGraph{std::string(spec), base_graph(spec), std::nullopt};
  const auto m = parse_count(spec.substr(slash + 1), "subdivision length");
  return build_named(spec.substr(0, slash), m);
}

BuiltGraph build_named(std::string_view spec, std::size_t m) {
  if (m == 0) throw GraphError("subdivision length must be positive");
  if (spec.find('/') != std::string_view::npos && m != 1)
    throw GraphError("subdivision given both in the graph spec and as m");
  auto base = build_named(spec);
  if (m == 1) return base;
  auto sub = subdivide(base.graph, m);
  return BuiltGraph{base.spec + "/" + std::to_string(m), std::move(sub.graph), std::move(sub.map)};
}

namespace {

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
  return b > std::numeric_limits<std::size_t>::max() - a ? std::numeric_limits<std::size_t>::max() : a + b;
}

// (vertices, edges) of the unsubdivided graph.
std::pair<std::size_t, std::size_t> base_size(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto head = spec.substr(0, colon);
  const auto body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (colon != std::string_view::npos) {
    if (head == "K") {
      const auto n = parse_count(body, "K:n parameter");
      return {n, sat_mul(n, n == 0 ? 0 : n - 1) / 2};
    }
    if (head == "C") {
      const auto n = parse_count(body, "C:n parameter");
      return {n, n};
    }
    if (head == "P") {
      const auto n = parse_count(body, "P:n parameter");
      return {n, n == 0 ? 0 : n - 1};
    }
    if (head == "Kab") {
      const auto comma = body.find(',');
      if (comma == std::string_view::npos) throw GraphError("Kab expects 'Kab:a,b'");
      const auto a = parse_count(body.substr(0, comma), "Kab:a parameter");
      const auto b = parse_count(body.substr(comma + 1), "Kab:b parameter");
      return {sat_add(a, b), sat_mul(a, b)};
    }
    if (head == "edges") {
      std::size_t max_vertex = 0, count = 0;
      std::size_t pos = 0;
      while (pos <= body.size()) {
        const auto comma = body.find(',', pos);
        const auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) throw GraphError("malformed edge '" + std::string(item) + "'");
        max_vertex = std::max({max_vertex, parse_count(item.substr(0, dash), "edge endpoint"),
                               parse_count(item.substr(dash + 1), "edge endpoint")});
        ++count;
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
      return {sat_add(max_vertex, 1), count};
    }
  }
  const auto g = base_graph(spec);  // fixed named graphs are small
  return {g.vertex_count(), g.edge_count()};
}

}  // namespace

std::size_t named_vertex_count(std::string_view spec) {
  const auto slash = spec.rfind('/');
  if (slash == std::string_view::npos) return base_size(spec).first;
  const auto m = parse_count(spec.substr(slash + 1), "subdivision length");
  if (m == 0) throw GraphError("subdivision length must be positive");
  const auto [n, e] = base_size(spec.substr(0, slash));
  return sat_add(n, sat_mul(e, m - 1));
}

// ---------------------------------------------------------------------------
// Subdivision

SubdividedGraph subdivide(const Graph& g, std::size_t m) {
  if (m == 0) throw GraphError("subdivision length must be positive");
  auto labels = g.labels();
  std::vector<Edge> edges;
  std::vector<Thread> threads;
  for (const auto& e : g.edges()) {
    Thread th{e.u, e.v, {}};
    Vertex prev = e.u;
    for (std::size_t i = 1; i < m; ++i) {
      const auto v = static_cast<Vertex>(labels.size());
      labels.push_back(g.label(e.u) + "-" + g.label(e.v) + "/" + std::to_string(i));
      th.internal.push_back(v);
      edges.push_back({prev, v});
      prev = v;
    }
    edges.push_back({prev, e.v});
    threads.push_back(std::move(th));
  }
  auto sub = Graph::from_edges(std::move(labels), edges);
  return SubdividedGraph{std::move(sub), SubdivisionMap(g.vertex_count(), m, std::move(threads))};
}

Graph subdivide_edge(const Graph& g, Edge e, std::size_t k) {
  if (k == 0) throw GraphError("subdivide_edge needs at least one new vertex");
  const Edge key{std::min(e.u, e.v), std::max(e.u, e.v)};
  const auto& all = g.edges();
  if (std::find(all.begin(), all.end(), key) == all.end()) throw GraphError("edge not present in graph");

  auto labels = g.labels();
  std::vector<Edge> edges;
  for (const auto& x : all)
    if (!(x == key)) edges.push_back(x);
  Vertex prev = key.u;
  for (std::size_t i = 1; i <= k; ++i) {
    const auto v = static_cast<Vertex>(labels.size());
    labels.push_back(g.label(key.u) + "-" + g.label(key.v) + "/" + std::to_string(i));
    edges.push_back({prev, v});
    prev = v;
  }
  edges.push_back({prev, key.v});
  return Graph::from_edges(std::move(labels), edges);
}

// ---------------------------------------------------------------------------
// Structure

Distance girth(const Graph& g) {
  const std::size_t n = g.vertex_count();
  Distance best = kInfiniteGirth;
  for (Vertex s = 0; s < n; ++s) {
    std::vector<Distance> dist(n, kUnreached);
    std::vector<Vertex> parent(n, s);
    std::queue<Vertex> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const Vertex u = q.front();
      q.pop();
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] == kUnreached) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          q.push(w);
        } else if (parent[u] != w && parent[w] != u) {
          best = std::min(best, dist[u] + dist[w] + 1);
        }
      }
    }
  }
  return best;
}

BipartiteCheck check_bipartite(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<int> color(n, -1);
  std::vector<Vertex> parent(n, 0);
  std::vector<Distance> depth(n, 0);
  std::queue<Vertex> q;
  color[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const Vertex u = q.front();
    q.pop();
    for (Vertex w : g.neighbors(u)) {
      if (color[w] == -1) {
        color[w] = 1 - color[u];
        parent[w] = u;
        depth[w] = depth[u] + 1;
        q.push(w);
      } else if (color[w] == color[u]) {
        // climb both tree paths to their common ancestor
        std::vector<Vertex> left{u};
        std::vector<Vertex> right{w};
        Vertex a = u;
        Vertex b = w;
        while (depth[a] > depth[b]) left.push_back(a = parent[a]);
        while (depth[b] > depth[a]) right.push_back(b = parent[b]);
        while (a != b) {
          left.push_back(a = parent[a]);
          right.push_back(b = parent[b]);
        }
        right.pop_back();
        BipartiteCheck out;
        out.odd_cycle = std::move(left);
        out.odd_cycle.insert(out.odd_cycle.end(), right.rbegin(), right.rend());
        return out;
      }
    }
  }
  BipartiteCheck out;
  out.bipartite = true;
  out.coloring = std::move(color);
  return out;
}

bool bipartite_witness_valid(const Graph& g, const BipartiteCheck& check) {
  if (check.bipartite) {
    if (check.coloring.size() != g.vertex_count()) return false;
    for (const auto& e : g.edges())
      if (check.coloring[e.u] == check.coloring[e.v]) return false;
    return true;
  }
  const auto& c = check.odd_cycle;
  if (c.size() < 3 || c.size() % 2 == 0) return false;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!g.adjacent(c[i], c[(i + 1) % c.size()])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json subdivision_to_json(const SubdivisionMap& map) {
  nlohmann::json threads = nlohmann::json::array();
  for (const auto& t : map.threads())
    threads.push_back({{"endpoint_u", t.endpoint_u}, {"endpoint_v", t.endpoint_v}, {"internal_vertices", t.internal}});
  std::vector<Vertex> originals(map.base_vertex_count());
  for (std::size_t i = 0; i < originals.size(); ++i) originals[i] = static_cast<Vertex>(i);
  return {{"base_vertex_count", map.base_vertex_count()},
          {"m", map.m()},
          {"original_vertices", originals},
          {"threads", std::move(threads)}};
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  return {{"labels", g.labels()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::json& j) {
  try {
    auto labels = j.at("labels").get<std::vector<std::string>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw GraphError("edge entries must be [i, j] pairs");
      edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
    }
    return Graph::from_edges(std::move(labels), edges);
  } catch (const nlohmann::json::exception& ex) {
    throw GraphError(std::string("malformed graph JSON: ") + ex.what());
  }
}

std::string graph_to_dot(const Graph& g, std::string_view name) {
  std::ostringstream os;
  os << "graph \"" << name << "\" {\n";
  for (Vertex v = 0; v < g.vertex_count(); ++v) os << "  " << v << " [label=\"" << g.label(v) << "\"];\n";
  for (const auto& e : g.edges()) os << "  " << e.u << " -- " << e.v << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace rlg
