#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rlg/graph.hpp"
#include "rlg/solver.hpp"
#include "rlg/strategies.hpp"
#include "service.hpp"

namespace rlg {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphArgs {
  std::string spec;
  std::size_t m = 1;
  std::string format = "text";
  std::string dot_path;

  void add(CLI::App* app) {
    app->add_option("--graph", spec, "builder spec, e.g. H, C:6, K:6/3, Kab:2,3")->required();
    app->add_option("--m", m, "subdivide every edge into a thread of this length")->check(CLI::PositiveNumber);
    app->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));
    app->add_option("--export-dot", dot_path, "write the graph as DOT to this file");
  }

  BuiltGraph build() const {
    try {
      return build_named(spec, m);
    } catch (const GraphError& e) {
      throw UsageError(e.what());
    }
  }

  void export_dot(const Graph& g) const {
    if (dot_path.empty()) return;
    std::ofstream f(dot_path);
    if (!f) throw std::runtime_error("cannot write " + dot_path);
    f << graph_to_dot(g);
  }
};

struct BudgetArgs {
  std::size_t states = SolveBudget{}.max_states;
  double seconds = SolveBudget{}.max_seconds;
  std::size_t rank = 0;
  unsigned threads = 1;

  void add(CLI::App* app) {
    app->add_option("--budget-states", states, "explored state cap")->check(CLI::PositiveNumber);
    app->add_option("--budget-seconds", seconds, "wall-clock cap")->check(CLI::PositiveNumber);
    app->add_option("--budget-rank", rank, "fixpoint round cap (0: number of states)");
    app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  SolveOptions options() const {
    SolveOptions o;
    o.budget = {states, seconds, rank};
    o.threads = threads;
    return o;
  }
};

// "3..6" or "4".
ParamRange parse_range(const std::string& name, const std::string& text) {
  ParamRange r{name, 0, 0};
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      r.first = r.last = std::stoi(text);
    } else {
      r.first = std::stoi(text.substr(0, dots));
      r.last = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw UsageError("bad range '" + text + "' for --" + name);
  }
  if (r.first > r.last) throw UsageError("empty range '" + text + "' for --" + name);
  return r;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void print_transcript(std::ostream& out, const Graph& g, const std::vector<std::pair<Vertex, Distance>>& t) {
  for (const auto& [p, a] : t) out << "  probe " << g.label(p) << " -> " << a << "\n";
}

int cmd_build(const GraphArgs& ga, std::ostream& out) {
  const auto built = ga.build();
  ga.export_dot(built.graph);
  if (ga.format == "json") {
    nlohmann::json j = {{"spec", built.spec}, {"graph", graph_to_json(built.graph)}};
    j["subdivision"] = built.subdivision ? subdivision_to_json(*built.subdivision) : nlohmann::json(nullptr);
    out << j.dump(2) << "\n";
    return 0;
  }
  const auto gi = girth(built.graph);
  out << built.spec << ": " << built.graph.vertex_count() << " vertices, " << built.graph.edge_count() << " edges, girth "
      << (gi == kInfiniteGirth ? std::string("inf") : std::to_string(gi)) << (is_bipartite(built.graph) ? ", bipartite" : "")
      << "\n";
  return 0;
}

int cmd_solve(const GraphArgs& ga, const BudgetArgs& ba, bool include_states, std::ostream& out) {
  const auto built = ga.build();
  ga.export_dot(built.graph);
  const auto r = solve(built.graph, ba.options());
  if (ga.format == "json") {
    auto j = solve_result_to_json(built.graph, r, include_states);
    j["spec"] = built.spec;
    out << j.dump(2) << "\n";
  } else {
    out << built.spec << ": " << to_string(r.verdict);
    if (r.verdict == Verdict::CopWins) out << " (capture bound " << r.capture_bound << ")";
    out << "\n";
    out << "states " << r.stats.states_explored << ", transitions " << r.stats.transitions << ", rounds "
        << r.stats.fixpoint_iterations << ", " << std::fixed << std::setprecision(3) << r.stats.wall_seconds << " s\n";
    if (!r.budget_note.empty()) out << "note: " << r.budget_note << "\n";
  }
  switch (r.verdict) {
    case Verdict::CopWins:
      return kExitCopWins;
    case Verdict::RobberWins:
      return kExitRobberWins;
    default:
      return kExitUnknown;
  }
}

int cmd_grid(const std::string& family, const std::map<std::string, std::string>& ranges, const BudgetArgs& ba,
             const std::string& format, const std::string& out_path, std::ostream& out) {
  std::vector<std::string> names;
  if (family == "kn") names = {"n", "m"};
  else if (family == "kab") names = {"a", "b", "m"};
  else if (family == "cycle") names = {"n"};
  else throw UsageError("unknown family '" + family + "'");
  std::vector<ParamRange> rs;
  for (const auto& n : names) {
    const auto it = ranges.find(n);
    if (it == ranges.end() || it->second.empty()) throw UsageError("--" + n + " is required for family " + family);
    rs.push_back(parse_range(n, it->second));
  }
  const auto grid = locatability_grid(family, rs, ba.options());
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << grid.to_json().dump(2) << "\n";
  }
  if (format == "json")
    out << grid.to_json().dump(2) << "\n";
  else
    out << grid.to_text();
  return 0;
}

struct VerifyArgs {
  std::string strategy, certificate, family_file, robber;
  std::uint32_t cap = 1000;
};

int cmd_verify(const GraphArgs& ga, const VerifyArgs& va, std::ostream& out) {
  const int chosen = !va.strategy.empty() + !va.certificate.empty() + !va.family_file.empty() + !va.robber.empty();
  if (chosen != 1) throw UsageError("give exactly one of --strategy, --certificate, --family, --robber");
  const auto built = ga.build();
  const auto& g = built.graph;
  nlohmann::json report;
  bool ok = false;

  if (!va.strategy.empty()) {
    const auto s = make_strategy(va.strategy, built);
    const auto c = verify_cop_strategy(g, *s, va.cap);
    ok = c.wins;
    report = strategy_check_to_json(g, va.strategy, c);
    if (ga.format == "text") {
      out << "strategy " << va.strategy << " on " << built.spec << ": ";
      if (c.wins)
        out << "wins, capture bound " << *c.capture_bound << " (" << c.states_visited << " positions)\n";
      else
        out << "fails: " << c.error << "\n";
      print_transcript(out, g, c.transcript);
    }
  } else if (!va.certificate.empty()) {
    const auto j = read_json_file(va.certificate);
    const auto& arr = j.is_object() ? j.at("certificate") : j;
    std::vector<VertexSet> family;
    for (const auto& s : arr) family.push_back(vertex_set_from_json(s, g.vertex_count()));
    ok = !family.empty() && verify_certificate(g, family);
    report = {{"spec", built.spec}, {"certificate_states", family.size()}, {"valid", ok}};
    if (ga.format == "text")
      out << "certificate (" << family.size() << " states) on " << built.spec << ": " << (ok ? "valid" : "invalid") << "\n";
  } else {
    EvasionFamily f;
    std::string name;
    if (!va.robber.empty()) {
      f = make_robber_plan(va.robber, built).family;
      name = va.robber;
    } else {
      f = evasion_family_from_json(read_json_file(va.family_file), g.vertex_count());
      name = va.family_file;
    }
    ok = verify_evasion_family(g, f);
    report = {{"spec", built.spec}, {"family", name}, {"members", f.members.size()}, {"lookahead", f.lookahead},
              {"valid", ok}};
    if (ga.format == "text")
      out << "evasion family " << name << " (" << f.members.size() << " states, lookahead " << f.lookahead << ") on "
          << built.spec << ": " << (ok ? "robber evades" : "not closed") << "\n";
  }
  if (ga.format == "json") out << report.dump(2) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robber Locating game: exact solver, strategies and play service", "rlg"};
  app.require_subcommand(1);

  GraphArgs build_ga;
  auto* build_cmd = app.add_subcommand("build", "build a graph and describe it");
  build_ga.add(build_cmd);

  GraphArgs solve_ga;
  BudgetArgs solve_ba;
  bool include_states = false;
  auto* solve_cmd = app.add_subcommand("solve", "decide locatability (exit 0 CopWins, 1 RobberWins, 2 Unknown)");
  solve_ga.add(solve_cmd);
  solve_ba.add(solve_cmd);
  solve_cmd->add_flag("--include-states", include_states, "emit policy and certificate in JSON output");

  std::string grid_family, grid_format = "text", grid_out;
  std::map<std::string, std::string> grid_ranges{{"n", ""}, {"m", ""}, {"a", ""}, {"b", ""}};
  BudgetArgs grid_ba;
  auto* grid_cmd = app.add_subcommand("grid", "verdict table over a graph family");
  grid_cmd->add_option("--family", grid_family, "kn, kab or cycle")->required();
  for (auto& [name, value] : grid_ranges) grid_cmd->add_option("--" + name, value, "range such as 3..6");
  grid_cmd->add_option("--format", grid_format)->check(CLI::IsMember({"json", "text"}));
  grid_cmd->add_option("--out", grid_out, "also write the JSON table here");
  grid_ba.add(grid_cmd);

  GraphArgs verify_ga;
  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "check a cop strategy, certificate or evasion family");
  verify_ga.add(verify_cmd);
  verify_cmd->add_option("--strategy", va.strategy, "cop strategy id: H, star, k2b-half, kab, kn");
  verify_cmd->add_option("--certificate", va.certificate, "robber-win certificate JSON (solve output or state list)");
  verify_cmd->add_option("--family", va.family_file, "evasion family JSON {members, lookahead}");
  verify_cmd->add_option("--robber", va.robber, "built-in evasion family: girth6, kn-small-m, kab, ka3-half");
  verify_cmd->add_option("--cap", va.cap, "round cap for strategy verification");

  ServiceConfig sc;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t idle_seconds = static_cast<std::size_t>(sc.idle_timeout.count());
  auto* serve_cmd = app.add_subcommand("serve", "JSON-over-HTTP play service");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--max-sessions", sc.max_sessions)->check(CLI::PositiveNumber);
  serve_cmd->add_option("--idle-seconds", idle_seconds, "evict sessions idle this long")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--max-vertices", sc.max_vertices)->check(CLI::PositiveNumber);
  serve_cmd->add_option("--budget-states", sc.budget.max_states)->check(CLI::PositiveNumber);
  serve_cmd->add_option("--budget-seconds", sc.budget.max_seconds)->check(CLI::PositiveNumber);
  serve_cmd->add_option("--threads", sc.solve_threads)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*build_cmd) return cmd_build(build_ga, out);
    if (*solve_cmd) return cmd_solve(solve_ga, solve_ba, include_states, out);
    if (*grid_cmd) return cmd_grid(grid_family, grid_ranges, grid_ba, grid_format, grid_out, out);
    if (*verify_cmd) return cmd_verify(verify_ga, va, out);
    if (*serve_cmd) {
      sc.idle_timeout = std::chrono::seconds(idle_seconds);
      sc.global_state_limit = std::max(sc.global_state_limit, sc.budget.max_states);
      Service service(sc);
      HttpFrontend http(service);
      const int bound = http.bind(host, port);
      if (bound < 0) {
        err << "rlg: cannot bind " << host << ":" << port << "\n";
        return kExitError;
      }
      out << "listening on http://" << host << ":" << bound << std::endl;
      http.run();
      return 0;
    }
  } catch (const UsageError& e) {
    err << "rlg: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StrategyError& e) {
    err << "rlg: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "rlg: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace rlg
