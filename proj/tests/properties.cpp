#include "properties.hpp"

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rlg/solver.hpp"

using namespace rlg;

namespace props {

namespace {

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

void fail(Outcome& o, const std::string& what) {
  if (o.ok) o.detail = what;
  o.ok = false;
}

}  // namespace

const std::vector<std::string>& small_catalog() {
  static const std::vector<std::string> specs = {
      "P:2", "P:3", "P:4", "P:5", "P:7", "C:3", "C:4", "C:5", "C:6", "C:7", "K:4", "K:5", "K:6", "K:7", "Kab:1,3",
      "Kab:1,6", "Kab:2,2", "Kab:2,3", "Kab:2,5", "Kab:3,3", "Kab:3,4",
      "edges:0-1,1-2,2-0,2-3",                      // paw
      "edges:0-1,1-2,2-3,3-0,0-2",                  // diamond
      "edges:0-1,1-2,2-0,1-3,2-4",                  // bull
      "edges:0-1,1-2,2-3,3-4,4-0,0-2",              // house
      "edges:0-1,1-2,2-3,3-4,4-5,5-0,0-3",          // theta
      "edges:0-1,0-2,0-3,3-4,4-5,5-6",              // spider
      "edges:0-1,1-2,2-3,3-4,4-5,5-6,6-0,0-3",      // 7-cycle with chord
      "edges:0-1,1-2,2-0,3-4,4-5,5-3,0-3,1-4,2-5",  // prism
      "edges:0-1,1-2,2-3,3-0,4-0,4-1,4-2,4-3",      // wheel W4
      "edges:0-1,1-2,2-3,3-4,4-5,5-0,6-0,6-2,6-4",  // 6-cycle plus hub on alternate vertices
      "K:3/2", "P:3/2", "C:3/2",
  };
  return specs;
}

std::vector<std::string> monotone_catalog() {
  std::vector<std::string> specs = small_catalog();
  for (const auto* s : {"H", "Hprime", "Petersen", "K:4/2", "K:3/3", "K:3/4", "Kab:2,3/2", "Kab:2,2/3", "C:8", "C:10",
                        "C:12", "P:12", "Kab:4,4", "Kab:1,11", "K:8", "edges:0-1,1-2,2-3,3-4,4-5,5-0,0-6,6-7,7-8"})
    specs.emplace_back(s);
  return specs;
}

Outcome partition_triples(int count, unsigned seed) {
  Outcome o;
  std::mt19937 rng(seed);
  const std::vector<std::string> named = {"H", "Hprime", "Petersen", "Heawood", "K:5/3", "Kab:3,4/2", "C:9", "K:6/2"};
  for (int trial = 0; trial < count; ++trial) {
    Graph g = trial % 4 == 0 ? build_named(named[(trial / 4) % named.size()]).graph : [&] {
      const int n = std::uniform_int_distribution<int>(2, 40)(rng);
      const auto [nn, edges] = oracle::random_connected(rng, n, 2.0 / n);
      return build_named(oracle::edges_spec(edges)).graph;
    }();
    const auto a = oracle::from_graph(g);
    const auto n = g.vertex_count();
    const auto s = random_state(rng, n);
    const Vertex v = std::uniform_int_distribution<Vertex>(0, static_cast<Vertex>(n - 1))(rng);
    const auto e = expand(g, s);
    std::ostringstream where;
    where << "trial " << trial << " state " << s.to_string() << " probe " << v;
    if (to_state(e) != oracle::expand(a, to_state(s))) fail(o, where.str() + ": expansion");

    const auto p = probe_partition(g, e, v);
    VertexSet uni(n);
    std::size_t total = 0;
    for (const auto& c : p.classes) {
      if (c.members.empty() || c.members.intersects(uni)) fail(o, where.str() + ": classes overlap");
      c.members.for_each([&](Vertex w) {
        if (g.distance(v, w) != c.distance) fail(o, where.str() + ": wrong distance");
      });
      total += c.members.count();
      uni |= c.members;
      const auto r = apply_round(g, KnowledgeState(s), v, c.distance);
      if (!r.state.candidates().is_subset_of(e) || r.state.candidates() != c.members ||
          r.cop_wins != c.members.is_singleton())
        fail(o, where.str() + ": refinement");
    }
    if (uni != e || total != e.count()) fail(o, where.str() + ": incomplete");
    const auto op = oracle::partition(a, to_state(e), static_cast<int>(v));
    if (op.size() != p.classes.size()) fail(o, where.str() + ": oracle class count");
    for (const auto& c : p.classes) {
      const auto it = op.find(static_cast<int>(c.distance));
      if (it == op.end() || it->second != to_state(c.members)) fail(o, where.str() + ": oracle classes");
    }
    ++o.checked;
  }
  return o;
}

Outcome subset_monotonicity() {
  Outcome o;
  for (const auto& spec : monotone_catalog()) {
    const auto g = build_named(spec).graph;
    if (g.vertex_count() > 12) fail(o, spec + ": more than 12 vertices");
    SolveOptions opt;
    opt.explore_all = true;
    const auto r = solve(g, opt);
    if (r.verdict == Verdict::Unknown) {
      fail(o, spec + ": Unknown");
      continue;
    }
    std::vector<std::pair<VertexSet, std::uint32_t>> states;
    for (const auto& [s, m] : r.policy.sorted_entries()) states.emplace_back(s, m.rank);
    for (const auto& s : r.losing_states) states.emplace_back(s, kNoRank);
    for (const auto& [t, kt] : states) {
      if (kt == kNoRank) continue;
      for (const auto& [s, ks] : states) {
        if (!s.is_subset_of(t)) continue;
        ++o.checked;
        if (ks > kt) fail(o, spec + ": " + s.to_string() + " below " + t.to_string());
      }
    }
  }
  return o;
}

Outcome minimax_agreement() {
  Outcome o;
  for (const auto& spec : small_catalog()) {
    const auto g = build_named(spec).graph;
    const auto a = oracle::from_graph(g);
    const auto r = solve(g);
    const bool naive = oracle::cop_wins(a);
    if (r.verdict == Verdict::Unknown || (r.verdict == Verdict::CopWins) != naive) fail(o, spec + ": verdict");
    if (naive) {
      oracle::Minimax mm(a);
      oracle::State all;
      for (int v = 0; v < a.n; ++v) all.insert(v);
      if (mm.rank(all, static_cast<int>(oracle::reachable(a).size())) != static_cast<int>(r.capture_bound))
        fail(o, spec + ": capture bound");
    }
    ++o.checked;
  }
  if (o.checked < 20) fail(o, "catalog too small");
  return o;
}

Outcome thread_determinism(unsigned threads) {
  Outcome o;
  for (const auto* spec : {"H", "C:6", "K:5/3", "Kab:3,3/2", "K:6/3", "Petersen", "Hprime", "K:4/3"}) {
    const auto g = build_named(spec).graph;
    SolveOptions one, many;
    many.threads = threads;
    const auto a = solve(g, one);
    const auto b = solve(g, many);
    auto ja = solve_result_to_json(g, a);
    auto jb = solve_result_to_json(g, b);
    ja["stats"].erase("wall_seconds");
    jb["stats"].erase("wall_seconds");
    if (!(a.policy == b.policy) || a.certificate != b.certificate || ja != jb) fail(o, std::string(spec) + ": differs");
    ++o.checked;
  }
  return o;
}

}  // namespace props
