#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rlg/game.hpp"

using namespace rlg;

namespace {

VertexSet set_of(const Graph& g, std::initializer_list<const char*> labels) {
  VertexSet s(g.vertex_count());
  for (const auto* l : labels) s.insert(g.resolve(l));
  return s;
}

oracle::State to_state(const VertexSet& s) {
  oracle::State out;
  s.for_each([&](Vertex v) { out.insert(static_cast<int>(v)); });
  return out;
}

VertexSet random_state(std::mt19937& rng, std::size_t n) {
  VertexSet s(n);
  std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.05, 0.6)(rng));
  for (Vertex v = 0; v < n; ++v)
    if (coin(rng)) s.insert(v);
  if (s.empty()) s.insert(std::uniform_int_distribution<Vertex>(0, static_cast<Vertex>(n - 1))(rng));
  return s;
}

}  // namespace

TEST_CASE("expand") {
  const auto c6 = cycle_graph(6);
  CHECK(expand(c6, VertexSet(6, {0})) == VertexSet(6, {5, 0, 1}));
  CHECK(expand(c6, c6.all_vertices()) == c6.all_vertices());
  const auto h = graph_h();
  CHECK(expand(h, set_of(h, {"v2", "v4"})) == set_of(h, {"v1", "v2", "v3", "v4", "v5"}));
}

TEST_CASE("probe_partition") {
  const auto c6 = cycle_graph(6);
  const auto p = probe_partition(c6, c6.all_vertices(), 0);
  REQUIRE(p.classes.size() == 4);
  CHECK(p.find(0)->members == VertexSet(6, {0}));
  CHECK(p.find(1)->members == VertexSet(6, {1, 5}));
  CHECK(p.find(2)->members == VertexSet(6, {2, 4}));
  CHECK(p.find(3)->members == VertexSet(6, {3}));
  CHECK(p.find(4) == nullptr);
  CHECK(p.answers() == std::vector<Distance>{0, 1, 2, 3});

  const auto single = probe_partition(c6, VertexSet(6, {4}), 4);
  REQUIRE(single.classes.size() == 1);
  CHECK(single.classes[0].distance == 0);

  const auto h = graph_h();
  const auto ph = probe_partition(h, set_of(h, {"v2", "v4"}), h.resolve("v1"));
  REQUIRE(ph.classes.size() == 2);
  CHECK(ph.find(1)->members == set_of(h, {"v2"}));
  REQUIRE(ph.find(3) != nullptr);
  CHECK(ph.find(3)->members == set_of(h, {"v4"}));
}

TEST_CASE("apply_round") {
  const auto h = graph_h();
  const auto r = apply_round(h, KnowledgeState(set_of(h, {"v2", "v4"})), h.resolve("v1"), 1);
  CHECK(r.state.candidates() == set_of(h, {"v2"}));
  CHECK(r.cop_wins);

  const auto c6 = cycle_graph(6);
  const auto r2 = apply_round(c6, KnowledgeState::initial(c6), 0, 2);
  CHECK(r2.state.candidates() == VertexSet(6, {2, 4}));
  CHECK_FALSE(r2.cop_wins);

  const auto r3 = apply_round(c6, KnowledgeState(VertexSet(6, {3})), 3, 0);
  CHECK(r3.cop_wins);

  CHECK_THROWS_AS(apply_round(c6, KnowledgeState::initial(c6), 0, 4), GameError);
  CHECK_THROWS_AS(apply_round(c6, KnowledgeState::initial(c6), 9, 0), GameError);
  CHECK_THROWS_AS(KnowledgeState(VertexSet(6)), GameError);
}

TEST_CASE("partition properties on 1000 random triples") {
  std::mt19937 rng(2024);
  const std::vector<std::string> named = {"H", "Hprime", "Petersen", "Heawood", "K:5/3", "Kab:3,4/2", "C:9", "K:6/2"};
  int triples = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Graph g = trial % 4 == 0 ? build_named(named[(trial / 4) % named.size()]).graph
                             : [&] {
                                 const int n = std::uniform_int_distribution<int>(2, 40)(rng);
                                 const auto [nn, edges] = oracle::random_connected(rng, n, 2.0 / n);
                                 return build_named(oracle::edges_spec(edges)).graph;
                               }();
    const auto a = oracle::from_graph(g);
    const auto n = g.vertex_count();
    const auto s = random_state(rng, n);
    const Vertex v = std::uniform_int_distribution<Vertex>(0, static_cast<Vertex>(n - 1))(rng);
    const auto e = expand(g, s);
    CHECK(to_state(e) == oracle::expand(a, to_state(s)));
    CHECK(s.is_subset_of(e));

    const auto p = probe_partition(g, e, v);
    CHECK(p.probe == v);
    std::size_t total = 0;
    VertexSet uni(n);
    Distance prev = 0;
    bool first = true;
    for (const auto& c : p.classes) {
      CHECK_FALSE(c.members.empty());
      CHECK_FALSE(c.members.intersects(uni));
      if (!first) CHECK(c.distance > prev);
      first = false;
      prev = c.distance;
      CHECK(c.distance <= g.eccentricity(v));
      c.members.for_each([&](Vertex w) { CHECK(g.distance(v, w) == c.distance); });
      total += c.members.count();
      uni |= c.members;
    }
    CHECK(total == e.count());
    CHECK(uni == e);

    const auto op = oracle::partition(a, to_state(e), static_cast<int>(v));
    REQUIRE(op.size() == p.classes.size());
    for (const auto& c : p.classes) CHECK(to_state(c.members) == op.at(static_cast<int>(c.distance)));

    // refinement
    for (const auto& c : p.classes) {
      const auto r = apply_round(g, KnowledgeState(s), v, c.distance);
      CHECK(r.state.candidates().is_subset_of(e));
      CHECK(r.cop_wins == c.members.is_singleton());
    }

    // monotonicity: a subset's classes are the intersections
    auto sub = s & random_state(rng, n);
    if (sub.empty()) sub.insert(s.first());
    const auto se = expand(g, sub);
    const auto sp = probe_partition(g, se, v);
    for (const auto& c : p.classes) {
      const auto inter = c.members & se;
      const auto* sc = sp.find(c.distance);
      if (inter.empty())
        CHECK(sc == nullptr);
      else
        CHECK((sc != nullptr && sc->members == inter));
    }
    ++triples;
  }
  CHECK(triples == 1000);
}

TEST_CASE("transcript replay is exact") {
  std::mt19937 rng(5);
  for (const auto& spec : {"H", "C:6", "K:5/3", "Petersen"}) {
    CAPTURE(spec);
    const auto g = std::make_shared<const Graph>(build_named(spec).graph);
    Transcript t(g, spec);
    for (int round = 0; round < 12 && !t.cop_won(); ++round) {
      const Vertex v = std::uniform_int_distribution<Vertex>(0, static_cast<Vertex>(g->vertex_count() - 1))(rng);
      const auto p = probe_partition(*g, expand(*g, t.current().candidates()), v);
      const auto& c = p.classes[std::uniform_int_distribution<std::size_t>(0, p.classes.size() - 1)(rng)];
      t.play(v, c.distance);
      CHECK(t.current().candidates() == c.members);
    }
    const auto j = nlohmann::json::parse(t.to_json().dump());
    const auto back = Transcript::from_json(j);
    REQUIRE(back.rounds().size() == t.rounds().size());
    for (std::size_t i = 0; i < t.rounds().size(); ++i) {
      CHECK(back.rounds()[i].probe == t.rounds()[i].probe);
      CHECK(back.rounds()[i].answer == t.rounds()[i].answer);
      CHECK(back.rounds()[i].state == t.rounds()[i].state);
    }
    CHECK(back.to_json() == t.to_json());
  }
}

TEST_CASE("transcripts never trust stored states") {
  nlohmann::json j = {{"graph", "C:6"},
                      {"rounds", {{{"probe", 0}, {"answer", 2}, {"state", {0, 1, 2, 3}}}}}};
  const auto t = Transcript::from_json(j);
  CHECK(t.current().candidates() == VertexSet(6, {2, 4}));

  nlohmann::json bad = {{"graph", "C:6"}, {"rounds", {{{"probe", 0}, {"answer", 2}}, {{"probe", 0}, {"answer", 0}}}}};
  CHECK_THROWS_AS(Transcript::from_json(bad), GameError);

  const auto inline_graph = graph_to_json(cycle_graph(5));
  nlohmann::json k = {{"graph", inline_graph}, {"rounds", {{{"probe", 0}, {"answer", 1}}}}};
  const auto t2 = Transcript::from_json(k);
  CHECK(t2.current().candidates() == VertexSet(5, {1, 4}));
  CHECK(t2.to_json().at("graph") == inline_graph);
}
