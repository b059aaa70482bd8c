#include <doctest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "rlg/solver.hpp"
#include "rlg/strategies.hpp"
#include "service.hpp"

using namespace rlg;
using nlohmann::json;

namespace {

ServiceResponse call(Service& s, const std::string& method, const std::string& path, const json& body = nullptr) {
  return s.handle(method, path, body.is_null() ? std::string{} : body.dump());
}

std::string open_session(Service& s, const std::string& spec, const std::string& mode = "human-cop") {
  const auto r = call(s, "POST", "/api/sessions", {{"spec", spec}, {"mode", mode}});
  REQUIRE(r.status == 201);
  return r.body.at("id").get<std::string>();
}

VertexSet candidates_of(const json& j, std::size_t n) { return vertex_set_from_json(j.at("candidates"), n); }

}  // namespace

TEST_CASE("builders lists families, strategies and limits") {
  Service s;
  const auto r = call(s, "GET", "/api/builders");
  CHECK(r.status == 200);
  CHECK(r.body.at("builders").size() >= 8);
  CHECK(r.body.at("modes").size() == 2);
  CHECK(r.body.at("strategies").size() == strategy_ids().size());
  CHECK(r.body.at("limits").at("max_vertices") == 512);
  CHECK(call(s, "POST", "/api/builders").status == 405);
}

TEST_CASE("solve endpoint agrees with the library") {
  Service s;
  for (const auto* spec : {"H", "C:6", "K:5/3", "Kab:3,3/2", "P:4"}) {
    CAPTURE(spec);
    const auto r = call(s, "POST", "/api/solve", {{"spec", spec}});
    REQUIRE(r.status == 200);
    const auto lib = solve(build_named(spec).graph);
    CHECK(r.body.at("verdict") == std::string(to_string(lib.verdict)));
    if (lib.verdict == Verdict::CopWins) CHECK(r.body.at("capture_bound") == lib.capture_bound);
    CHECK_FALSE(r.body.contains("policy"));
  }
  const auto full = call(s, "POST", "/api/solve", {{"spec", "H"}, {"include_states", true}});
  CHECK(full.body.at("policy").size() == solve(graph_h()).policy.size());

  // budgets can be lowered, not raised
  const auto tight = call(s, "POST", "/api/solve", {{"spec", "K:6/5"}, {"budget", {{"max_states", 100}}}});
  CHECK(tight.status == 200);
  CHECK(tight.body.at("verdict") == "Unknown");
  const auto greedy = call(s, "POST", "/api/solve", {{"spec", "C:6"}, {"budget", {{"max_states", 1'000'000'000}}}});
  CHECK(greedy.body.at("budget").at("max_states") == s.config().budget.max_states);
}

TEST_CASE("error codes") {
  ServiceConfig cfg;
  cfg.max_vertices = 50;
  Service s(cfg);
  CHECK(s.handle("POST", "/api/solve", "{not json").status == 400);
  CHECK(s.handle("POST", "/api/solve", "[1,2]").status == 400);
  CHECK(call(s, "POST", "/api/solve", {{"spec", "bogus"}}).status == 422);
  CHECK(call(s, "POST", "/api/solve", {{"nospec", 1}}).status == 422);
  CHECK(call(s, "POST", "/api/solve", {{"spec", "K:20/3"}}).status == 413);
  CHECK(call(s, "POST", "/api/sessions", {{"spec", "K:1000/1000"}}).status == 413);
  CHECK(call(s, "GET", "/api/solve").status == 405);
  CHECK(call(s, "GET", "/api/nothing").status == 404);
  CHECK(call(s, "GET", "/api/sessions/deadbeef").status == 404);
  CHECK(call(s, "POST", "/api/sessions/deadbeef/probe", {{"vertex", 0}}).status == 404);
  CHECK(call(s, "POST", "/api/sessions", {{"spec", "C:6"}, {"mode", "spectator"}}).status == 422);

  const auto id = open_session(s, "C:6");
  CHECK(call(s, "PUT", "/api/sessions/" + id).status == 405);
  CHECK(call(s, "GET", "/api/sessions/" + id + "/probe").status == 405);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/probe", {{"vertex", 6}}).status == 422);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/probe", {{"vertex", -1}}).status == 422);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/probe", {{"vertex", "zz"}}).status == 422);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/probe", json::object()).status == 422);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/move", {{"vertex", 0}}).status == 409);

  const auto rid = open_session(s, "P:4", "human-robber");
  CHECK(call(s, "POST", "/api/sessions/" + rid + "/probe", {{"vertex", 0}}).status == 409);
}

TEST_CASE("human-cop answers are partition keys and match offline replay") {
  Service s;
  std::mt19937 rng(3);
  for (const auto* spec : {"H", "C:6", "K:5/3", "Petersen", "Kab:2,3/2"}) {
    CAPTURE(spec);
    const auto g = build_named(spec).graph;
    const auto solved = solve(g);
    const auto id = open_session(s, spec);
    KnowledgeState k = KnowledgeState::initial(g);
    std::vector<std::pair<Vertex, Distance>> played;
    bool won = false;
    for (int round = 0; round < 40 && !won; ++round) {
      const Vertex v = std::uniform_int_distribution<Vertex>(0, static_cast<Vertex>(g.vertex_count() - 1))(rng);
      const auto r = call(s, "POST", "/api/sessions/" + id + "/probe", {{"vertex", v}});
      REQUIRE(r.status == 200);
      const Distance d = r.body.at("answer");
      const auto p = probe_partition(g, expand(g, k.candidates()), v);
      REQUIRE(p.find(d) != nullptr);
      // adversary never hands over a position the cop can force from
      // when an alternative exists
      if (solved.verdict == Verdict::RobberWins) CHECK_FALSE(solved.cop_winning(p.find(d)->members));
      k = apply_round(g, k, v, d).state;
      played.emplace_back(v, d);
      CHECK(candidates_of(r.body, g.vertex_count()) == k.candidates());
      won = r.body.at("won");
      CHECK(won == k.located());
    }
    if (solved.verdict == Verdict::RobberWins) CHECK_FALSE(won);

    const auto state = call(s, "GET", "/api/sessions/" + id);
    REQUIRE(state.status == 200);
    const auto replay = Transcript::from_json(state.body.at("transcript"));
    CHECK(replay.current().candidates() == k.candidates());
    REQUIRE(replay.rounds().size() == played.size());
    for (std::size_t i = 0; i < played.size(); ++i) {
      CHECK(replay.rounds()[i].probe == played[i].first);
      CHECK(replay.rounds()[i].answer == played[i].second);
    }
    CHECK(state.body.at("status") == (won ? "cop-won" : "in-progress"));
    if (won) CHECK(call(s, "POST", "/api/sessions/" + id + "/probe", {{"vertex", 0}}).status == 409);
  }
}

TEST_CASE("a human cop following the solver policy wins within the bound") {
  Service s;
  const auto g = graph_h();
  const auto solved = solve(g);
  const auto id = open_session(s, "H");
  KnowledgeState k = KnowledgeState::initial(g);
  std::uint32_t rounds = 0;
  for (bool won = false; !won; ++rounds) {
    REQUIRE(rounds < solved.capture_bound);
    const auto* m = solved.policy.find(k.candidates());
    REQUIRE(m != nullptr);
    const auto r = call(s, "POST", "/api/sessions/" + id + "/probe", {{"vertex", g.label(m->probe)}});
    REQUIRE(r.status == 200);
    k = apply_round(g, k, m->probe, r.body.at("answer")).state;
    won = r.body.at("won");
  }
  CHECK(rounds <= solved.capture_bound);
  CHECK(call(s, "GET", "/api/sessions/" + id).body.at("status") == "cop-won");
}

TEST_CASE("human-robber sessions probe with the policy and win within the bound") {
  Service s;
  std::mt19937 rng(9);
  for (const auto* spec : {"H", "P:5", "K:4/3", "Kab:2,3/2"}) {
    CAPTURE(spec);
    const auto g = build_named(spec).graph;
    const auto solved = solve(g);
    REQUIRE(solved.verdict == Verdict::CopWins);
    for (int game = 0; game < 10; ++game) {
      const auto id = open_session(s, spec, "human-robber");
      Vertex at = std::uniform_int_distribution<Vertex>(0, static_cast<Vertex>(g.vertex_count() - 1))(rng);
      bool won = false;
      std::uint32_t rounds = 0;
      while (!won) {
        REQUIRE(rounds < solved.capture_bound);
        const auto before = call(s, "GET", "/api/sessions/" + id).body;
        const auto cands = candidates_of(before, g.vertex_count());
        const auto r = call(s, "POST", "/api/sessions/" + id + "/move", {{"vertex", at}});
        REQUIRE(r.status == 200);
        CHECK(r.body.at("non_optimal") == false);
        CHECK(r.body.at("probe") == solved.policy.find(cands)->probe);
        CHECK(r.body.at("answer") == g.distance(r.body.at("probe").get<Vertex>(), at));
        CHECK(candidates_of(r.body, g.vertex_count()).contains(at));
        won = r.body.at("won");
        ++rounds;
        // next move: stay or step to a random neighbour
        const auto nb = g.closed_neighborhood(at);
        std::vector<Vertex> opts;
        nb.for_each([&](Vertex w) { opts.push_back(w); });
        at = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)];
      }
      CHECK(rounds <= solved.capture_bound);
      CHECK(call(s, "POST", "/api/sessions/" + id + "/move", {{"vertex", at}}).status == 409);
      CHECK(call(s, "DELETE", "/api/sessions/" + id).status == 200);
    }
  }
}

TEST_CASE("human-robber moves must follow edges and robber-win graphs are flagged") {
  Service s;
  const auto id = open_session(s, "C:6", "human-robber");
  const auto first = call(s, "POST", "/api/sessions/" + id + "/move", {{"vertex", 1}});
  REQUIRE(first.status == 200);
  CHECK(first.body.at("non_optimal") == true);
  CHECK(first.body.at("won") == false);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/move", {{"vertex", 4}}).status == 422);
  CHECK(call(s, "POST", "/api/sessions/" + id + "/move", {{"vertex", 2}}).status == 200);
  const auto j = call(s, "GET", "/api/sessions/" + id).body;
  CHECK(j.at("robber") == 2);
  CHECK(j.at("round") == 2);
  CHECK(j.at("verdict") == "RobberWins");
}

TEST_CASE("transcript import replays rounds") {
  Service s;
  json t = {{"graph", "C:6"}, {"rounds", {{{"probe", 0}, {"answer", 2}}}}};
  const auto r = call(s, "POST", "/api/sessions", {{"transcript", t}});
  REQUIRE(r.status == 201);
  CHECK(candidates_of(r.body, 6) == VertexSet(6, {2, 4}));
  CHECK(r.body.at("round") == 1);

  json bad = {{"graph", "C:6"}, {"rounds", {{{"probe", 0}, {"answer", 4}}}}};
  CHECK(call(s, "POST", "/api/sessions", {{"transcript", bad}}).status == 422);
  json out_of_range = {{"graph", "C:6"}, {"rounds", {{{"probe", 9}, {"answer", 0}}}}};
  CHECK(call(s, "POST", "/api/sessions", {{"transcript", out_of_range}}).status == 422);
  json after_win = {{"graph", "P:3"}, {"rounds", {{{"probe", 0}, {"answer", 0}}, {{"probe", 0}, {"answer", 1}}}}};
  CHECK(call(s, "POST", "/api/sessions", {{"transcript", after_win}}).status == 422);
  CHECK(call(s, "POST", "/api/sessions", {{"transcript", t}, {"mode", "human-robber"}}).status == 422);
  CHECK(s.session_count() == 1);
}

TEST_CASE("session cap, deletion and idle eviction") {
  ServiceConfig cfg;
  cfg.max_sessions = 3;
  cfg.idle_timeout = std::chrono::seconds(60);
  Service s(cfg);
  std::vector<std::string> ids;
  for (int i = 0; i < 3; ++i) ids.push_back(open_session(s, "P:3"));
  CHECK(call(s, "POST", "/api/sessions", {{"spec", "P:3"}}).status == 503);

  const auto del = call(s, "DELETE", "/api/sessions/" + ids[0]);
  CHECK(del.status == 200);
  CHECK(del.body.at("status") == "aborted");
  CHECK(call(s, "GET", "/api/sessions/" + ids[0]).status == 404);
  CHECK(call(s, "DELETE", "/api/sessions/" + ids[0]).status == 404);
  CHECK(s.session_count() == 2);

  s.age_session(ids[1], std::chrono::seconds(120));
  CHECK(s.evict_idle() == 1);
  CHECK(s.session_count() == 1);
  CHECK(call(s, "GET", "/api/sessions/" + ids[1]).status == 404);
  CHECK(call(s, "GET", "/api/sessions/" + ids[2]).status == 200);
  ids.push_back(open_session(s, "P:3"));
  CHECK(ids[3] != ids[2]);
}

TEST_CASE("concurrent sessions stay independent") {
  Service s;
  const auto g = graph_h();
  const auto solved = solve(g);
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(open_session(s, "H"));
  std::vector<int> outcome(ids.size(), 0);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    pool.emplace_back([&, i] {
      KnowledgeState k = KnowledgeState::initial(g);
      for (std::uint32_t r = 0; r < solved.capture_bound; ++r) {
        const auto probe = solved.policy.find(k.candidates())->probe;
        const auto resp = call(s, "POST", "/api/sessions/" + ids[i] + "/probe", {{"vertex", probe}});
        if (resp.status != 200) return;
        k = apply_round(g, k, probe, resp.body.at("answer")).state;
        if (resp.body.at("won") == true) {
          outcome[i] = 1;
          return;
        }
      }
    });
  }
  // concurrent solves share the state budget
  std::thread solver([&] {
    for (int i = 0; i < 5; ++i) CHECK(call(s, "POST", "/api/solve", {{"spec", "K:5/3"}}).status == 200);
  });
  for (auto& t : pool) t.join();
  solver.join();
  for (int o : outcome) CHECK(o == 1);
}

TEST_CASE("HTTP transport forwards to the service") {
  Service s;
  HttpFrontend http(s);
  const int port = http.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  http.start();
  httplib::Client cli("127.0.0.1", port);
  const auto b = cli.Get("/api/builders");
  REQUIRE(b);
  CHECK(b->status == 200);
  CHECK(json::parse(b->body).contains("builders"));

  const auto created = cli.Post("/api/sessions", json{{"spec", "P:4"}}.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = json::parse(created->body).at("id").get<std::string>();
  const auto probed = cli.Post(("/api/sessions/" + id + "/probe").c_str(), json{{"vertex", 0}}.dump(), "application/json");
  REQUIRE(probed);
  CHECK(probed->status == 200);
  CHECK(json::parse(probed->body).at("won") == true);

  const auto bad = cli.Post("/api/solve", "{oops", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  const auto gone = cli.Delete(("/api/sessions/" + id).c_str());
  REQUIRE(gone);
  CHECK(gone->status == 200);
  CHECK(json::parse(gone->body).at("status") == "cop-won");
  http.stop();
}
