#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rlg/graph.hpp"

using namespace rlg;

TEST_CASE("builders produce the expected sizes") {
  CHECK(complete_graph(5).vertex_count() == 5);
  CHECK(complete_graph(5).edge_count() == 10);
  CHECK(complete_bipartite(2, 3).edge_count() == 6);
  CHECK(cycle_graph(6).edge_count() == 6);
  CHECK(path_graph(4).edge_count() == 3);
  CHECK(graph_h().vertex_count() == 11);
  CHECK(graph_h().edge_count() == 12);
  CHECK(graph_h_prime().vertex_count() == 12);
  CHECK(graph_h_prime().edge_count() == 13);
  CHECK(petersen_graph().vertex_count() == 10);
  CHECK(petersen_graph().edge_count() == 15);
  CHECK(heawood_graph().vertex_count() == 14);
  CHECK(heawood_graph().edge_count() == 21);
}

TEST_CASE("H is an 11-cycle plus the chord v3v9") {
  const auto h = graph_h();
  for (Vertex i = 0; i < 11; ++i) CHECK(h.adjacent(i, (i + 1) % 11));
  CHECK(h.adjacent(h.resolve("v3"), h.resolve("v9")));
  CHECK(h.degree(h.resolve("v3")) == 3);
  CHECK(h.degree(h.resolve("v9")) == 3);
  // a 6-cycle and a 7-cycle sharing the chord
  CHECK(girth(h) == 6);
  CHECK_FALSE(is_bipartite(h));
}

TEST_CASE("H' is bipartite with girth 6") {
  const auto hp = graph_h_prime();
  CHECK(is_bipartite(hp));
  CHECK(girth(hp) == 6);
}

TEST_CASE("girth and bipartiteness match the oracle") {
  const std::vector<std::string> specs = {"K:3", "K:4", "C:4", "C:5", "C:6", "C:9", "P:5", "Petersen", "Heawood",
                                          "H",   "Kab:2,3", "Kab:3,3/2", "K:4/3"};
  const std::map<std::string, int> expected = {{"K:3", 3}, {"K:4", 3}, {"C:4", 4}, {"C:5", 5}, {"Petersen", 5},
                                               {"Heawood", 6}, {"H", 6}};
  for (const auto& spec : specs) {
    CAPTURE(spec);
    const auto g = build_named(spec).graph;
    const auto a = oracle::from_graph(g);
    const int og = oracle::girth(a);
    if (og == 0)
      CHECK(girth(g) == kInfiniteGirth);
    else
      CHECK(static_cast<int>(girth(g)) == og);
    if (const auto it = expected.find(spec); it != expected.end()) CHECK(og == it->second);
    const auto bc = check_bipartite(g);
    CHECK(bipartite_witness_valid(g, bc));
  }
}

TEST_CASE("distances agree with Floyd-Warshall on random graphs") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 14;
    const auto [nn, edges] = oracle::random_connected(rng, n, 0.15);
    const auto g = build_named(oracle::edges_spec(edges)).graph;
    const auto d = oracle::floyd(nn, edges);
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
      for (Vertex v = 0; v < g.vertex_count(); ++v) REQUIRE(static_cast<int>(g.distance(u, v)) == d[u][v]);
      // layers partition V by distance
      std::size_t total = 0;
      const auto& layers = g.distance_layers(u);
      for (Distance k = 0; k < layers.size(); ++k) {
        total += layers[k].count();
        layers[k].for_each([&](Vertex w) { CHECK(g.distance(u, w) == k); });
      }
      CHECK(total == g.vertex_count());
    }
  }
}

TEST_CASE("subdivision invariants") {
  for (const auto& [base, m] : std::vector<std::pair<std::string, std::size_t>>{
           {"K:4", 3}, {"K:5", 2}, {"Kab:2,3", 2}, {"K:6", 5}, {"C:5", 4}, {"Petersen", 2}}) {
    CAPTURE(base);
    CAPTURE(m);
    const auto g = build_named(base).graph;
    const auto sub = subdivide(g, m);
    const auto& map = sub.map;
    CHECK(map.base_vertex_count() == g.vertex_count());
    CHECK(map.m() == m);
    CHECK(sub.graph.vertex_count() == g.vertex_count() + g.edge_count() * (m - 1));
    CHECK(named_vertex_count(base + "/" + std::to_string(m)) == sub.graph.vertex_count());
    std::set<Vertex> seen;
    for (std::size_t t = 0; t < map.threads().size(); ++t) {
      const auto& th = map.threads()[t];
      CHECK(th.internal.size() == m - 1);
      CHECK(th.endpoint_u < th.endpoint_v);
      CHECK(g.adjacent(th.endpoint_u, th.endpoint_v));
      CHECK(sub.graph.distance(th.endpoint_u, th.endpoint_v) <= m);
      for (std::size_t i = 0; i < th.internal.size(); ++i) {
        const Vertex v = th.internal[i];
        CHECK(seen.insert(v).second);
        CHECK(sub.graph.degree(v) == 2);
        CHECK_FALSE(map.is_original(v));
        const auto p = map.locate(v);
        REQUIRE(p.has_value());
        CHECK(p->thread == t);
        CHECK(p->offset == i + 1);
        CHECK(map.vertex_at(*p) == v);
        CHECK(map.vertex_on(th.endpoint_u, th.endpoint_v, i + 1) == v);
        CHECK(map.vertex_on(th.endpoint_v, th.endpoint_u, m - 1 - i) == v);
        CHECK(sub.graph.label(v) ==
              g.label(th.endpoint_u) + "-" + g.label(th.endpoint_v) + "/" + std::to_string(i + 1));
      }
      if (m % 2 == 0) {
        CHECK(map.midpoint(t) == map.vertex_on(th.endpoint_u, th.endpoint_v, m / 2));
        CHECK_FALSE(map.near_midpoints(t).has_value());
      } else if (m > 1) {
        const auto nm = map.near_midpoints(t);
        REQUIRE(nm.has_value());
        CHECK(nm->first == map.vertex_on(th.endpoint_u, th.endpoint_v, m / 2));
        CHECK(nm->second == map.vertex_on(th.endpoint_u, th.endpoint_v, m / 2 + 1));
        CHECK_FALSE(map.midpoint(t).has_value());
      }
    }
    CHECK(seen.size() == g.edge_count() * (m - 1));
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      CHECK(map.is_original(v));
      CHECK(sub.graph.label(v) == g.label(v));
      CHECK_FALSE(map.locate(v).has_value());
    }
    // distances between originals scale by m
    for (Vertex u = 0; u < g.vertex_count(); ++u)
      for (Vertex v = 0; v < g.vertex_count(); ++v) CHECK(sub.graph.distance(u, v) == g.distance(u, v) * m);
  }
}

TEST_CASE("K3 subdivided twice is C6") {
  CHECK(oracle::isomorphic(build_named("K:3/2").graph, cycle_graph(6)));
  CHECK_FALSE(oracle::isomorphic(build_named("K:3/2").graph, path_graph(6)));
}

TEST_CASE("spec parsing") {
  CHECK(build_named("K:6/3").spec == "K:6/3");
  CHECK(build_named("K:6", 3).graph == build_named("K:6/3").graph);
  CHECK(build_named("K:6/1").subdivision == std::nullopt);
  CHECK(build_named("K:6/3").subdivision.has_value());
  CHECK(build_named("edges:0-1,1-2,2-0").graph.edge_count() == 3);
  CHECK(build_named("H'").graph == graph_h_prime());
  CHECK_THROWS_AS(build_named("bogus"), GraphError);
  CHECK_THROWS_AS(build_named("K:"), GraphError);
  CHECK_THROWS_AS(build_named("K:4/0"), GraphError);
  CHECK_THROWS_AS(build_named("K:4/2", 3), GraphError);
  CHECK_THROWS_AS(build_named("edges:0-1,2-3"), GraphError);  // disconnected
  CHECK_THROWS_AS(build_named("edges:0-0"), GraphError);      // loop
  CHECK_THROWS_AS(build_named("edges:0-1,1-0"), GraphError);  // parallel
  CHECK_THROWS_AS(named_vertex_count("nope:3"), GraphError);
  CHECK(named_vertex_count("K:1000/1000") == 1000 + 499500ULL * 999);
  for (const auto& s : {"K:5", "Kab:3,4/2", "C:7/3", "P:5/2", "H/2", "Hprime", "Petersen/3", "Heawood", "edges:0-1,1-2,2-3/2"})
    CHECK(named_vertex_count(s) == build_named(s).graph.vertex_count());
}

TEST_CASE("labels resolve to indices") {
  const auto h = graph_h();
  CHECK(h.resolve("v1") == 0);
  CHECK(h.resolve("v11") == 10);
  CHECK(h.resolve("4") == 4);
  CHECK_THROWS_AS(h.resolve("zz"), GraphError);
}

TEST_CASE("JSON and DOT export") {
  const auto g = build_named("K:4/2").graph;
  const auto j = graph_to_json(g);
  CHECK(j.at("labels").size() == g.vertex_count());
  CHECK(j.at("edges").size() == g.edge_count());
  CHECK(graph_from_json(j) == g);
  CHECK(graph_from_json(nlohmann::json::parse(j.dump())) == g);
  const auto dot = graph_to_dot(g);
  CHECK(dot.find("graph") != std::string::npos);
  CHECK(dot == graph_to_dot(build_named("K:4/2").graph));
  const auto sj = subdivision_to_json(*build_named("K:4/2").subdivision);
  CHECK(sj.at("threads").size() == 6);
  CHECK(sj.at("m") == 2);
  CHECK(sj.at("original_vertices").size() == 4);
}

TEST_CASE("Heawood and Petersen against their oracle girths") {
  CHECK(oracle::girth(oracle::from_graph(heawood_graph())) == 6);
  CHECK(oracle::girth(oracle::from_graph(petersen_graph())) == 5);
  CHECK(is_bipartite(heawood_graph()));
  for (Vertex v = 0; v < 14; ++v) CHECK(heawood_graph().degree(v) == 3);
  for (Vertex v = 0; v < 10; ++v) CHECK(petersen_graph().degree(v) == 3);
}
