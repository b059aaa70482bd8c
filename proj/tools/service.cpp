#include "service.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "rlg/strategies.hpp"

namespace rlg {

namespace {

struct HttpError {
  int status;
  std::string message;
};

ServiceResponse error(int status, std::string message) { return {status, {{"error", std::move(message)}}}; }

std::string_view mode_name(SessionMode m) { return m == SessionMode::HumanCop ? "human-cop" : "human-robber"; }

SessionMode parse_mode(const nlohmann::json& body) {
  const auto m = body.value("mode", std::string("human-cop"));
  if (m == "human-cop") return SessionMode::HumanCop;
  if (m == "human-robber") return SessionMode::HumanRobber;
  throw HttpError{422, "mode must be human-cop or human-robber"};
}

Vertex parse_vertex(const Graph& g, const nlohmann::json& body) {
  if (!body.contains("vertex")) throw HttpError{422, "missing vertex"};
  const auto& v = body.at("vertex");
  if (v.is_number_integer()) {
    const auto i = v.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= g.vertex_count())
      throw HttpError{422, "vertex " + std::to_string(i) + " out of range"};
    return static_cast<Vertex>(i);
  }
  if (v.is_string()) {
    if (const auto found = g.find_label(v.get<std::string>())) return *found;
    throw HttpError{422, "no vertex labelled '" + v.get<std::string>() + "'"};
  }
  throw HttpError{422, "vertex must be an index or a label"};
}

// Probe leaving the smallest worst class; lowest index on ties.
Vertex largest_class_probe(const Graph& g, const VertexSet& expanded) {
  Vertex best = 0;
  std::size_t best_worst = std::numeric_limits<std::size_t>::max();
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    std::size_t worst = 0;
    for (const auto& c : probe_partition(g, expanded, v).classes) worst = std::max(worst, c.members.count());
    if (worst < best_worst) {
      best = v;
      best_worst = worst;
    }
  }
  return best;
}

std::string random_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  std::ostringstream os;
  os << std::hex << rng();
  return os.str();
}

}  // namespace

PlaySession::PlaySession(std::string id_, std::string spec_, SessionMode mode_, std::shared_ptr<const BuiltGraph> built_,
                         std::shared_ptr<const SolveResult> solved_)
    : id(std::move(id_)),
      spec(std::move(spec_)),
      mode(mode_),
      built(std::move(built_)),
      solved(std::move(solved_)),
      transcript(std::shared_ptr<const Graph>(built, &built->graph), spec),
      last_used(std::chrono::steady_clock::now()) {}

std::string PlaySession::status() const {
  if (aborted) return "aborted";
  return transcript.cop_won() ? "cop-won" : "in-progress";
}

nlohmann::json PlaySession::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["spec"] = spec;
  j["mode"] = std::string(mode_name(mode));
  j["status"] = status();
  j["graph"] = graph_to_json(built->graph);
  j["subdivision"] = built->subdivision ? subdivision_to_json(*built->subdivision) : nlohmann::json(nullptr);
  j["verdict"] = std::string(to_string(solved->verdict));
  j["capture_bound"] = solved->verdict == Verdict::CopWins ? nlohmann::json(solved->capture_bound) : nlohmann::json(nullptr);
  j["candidates"] = vertex_set_to_json(transcript.current().candidates());
  j["won"] = transcript.cop_won();
  j["round"] = transcript.rounds().size();
  j["transcript"] = transcript.to_json();
  if (mode == SessionMode::HumanRobber) {
    j["robber"] = robber ? nlohmann::json(*robber) : nlohmann::json(nullptr);
    j["non_optimal"] = solved->verdict != Verdict::CopWins;
  }
  return j;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {}

ServiceResponse Service::handle(const std::string& method, const std::string& path, const std::string& body_text) {
  static const std::regex session_re(R"(^/api/sessions/([A-Za-z0-9]+)(/(probe|move))?/?$)");
  try {
    nlohmann::json body = nlohmann::json::object();
    if (!body_text.empty()) {
      body = nlohmann::json::parse(body_text, nullptr, false);
      if (body.is_discarded()) return error(400, "request body is not valid JSON");
      if (!body.is_object()) return error(400, "request body must be a JSON object");
    }
    evict_idle();

    if (path == "/api/builders" || path == "/api/builders/") {
      if (method != "GET") return error(405, "use GET");
      return builders();
    }
    if (path == "/api/solve" || path == "/api/solve/") {
      if (method != "POST") return error(405, "use POST");
      return solve(body);
    }
    if (path == "/api/sessions" || path == "/api/sessions/") {
      if (method != "POST") return error(405, "use POST");
      return create_session(body);
    }
    std::smatch m;
    if (std::regex_match(path, m, session_re)) {
      const std::string id = m[1];
      const std::string action = m[3];
      if (action.empty()) {
        if (method == "GET") return get_session(id);
        if (method == "DELETE") return delete_session(id);
        return error(405, "use GET or DELETE");
      }
      if (method != "POST") return error(405, "use POST");
      return action == "probe" ? probe(id, body) : move(id, body);
    }
    return error(404, "no endpoint " + path);
  } catch (const HttpError& e) {
    return error(e.status, e.message);
  } catch (const GraphError& e) {
    return error(422, e.what());
  } catch (const GameError& e) {
    return error(422, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

ServiceResponse Service::builders() const {
  nlohmann::json list = nlohmann::json::array();
  auto add = [&](const char* family, const char* syntax, const char* example, const char* about) {
    list.push_back({{"family", family}, {"syntax", syntax}, {"example", example}, {"description", about}});
  };
  add("K", "K:n", "K:5", "complete graph");
  add("Kab", "Kab:a,b", "Kab:3,3", "complete bipartite graph");
  add("C", "C:n", "C:6", "cycle");
  add("P", "P:n", "P:4", "path");
  add("H", "H", "H", "11-cycle with chord v3v9");
  add("Hprime", "Hprime", "Hprime", "H with the edge v5v6 subdivided once");
  add("Petersen", "Petersen", "Petersen", "Petersen graph");
  add("Heawood", "Heawood", "Heawood", "Heawood graph");
  add("edges", "edges:u-v,...", "edges:0-1,1-2,2-0", "explicit edge list over 0..n-1");
  nlohmann::json j;
  j["builders"] = std::move(list);
  j["subdivision"] = {{"syntax", "<spec>/m"}, {"example", "K:6/3"}, {"description", "every edge becomes a thread of length m"}};
  j["strategies"] = strategy_ids();
  j["modes"] = {"human-cop", "human-robber"};
  j["limits"] = {{"max_vertices", config_.max_vertices},
                 {"max_states", config_.budget.max_states},
                 {"max_seconds", config_.budget.max_seconds},
                 {"max_sessions", config_.max_sessions}};
  return {200, std::move(j)};
}

std::shared_ptr<const BuiltGraph> Service::build(const std::string& spec) const {
  const auto n = named_vertex_count(spec);
  if (n > config_.max_vertices)
    throw HttpError{413, spec + " has " + std::to_string(n) + " vertices; the limit is " +
                             std::to_string(config_.max_vertices)};
  return std::make_shared<const BuiltGraph>(build_named(spec));
}

SolveBudget Service::budget_from(const nlohmann::json& body) const {
  SolveBudget b = config_.budget;
  if (!body.contains("budget")) return b;
  const auto& j = body.at("budget");
  if (!j.is_object()) throw HttpError{422, "budget must be an object"};
  if (j.contains("max_states")) b.max_states = std::min(b.max_states, j.at("max_states").get<std::size_t>());
  if (j.contains("max_seconds")) b.max_seconds = std::min(b.max_seconds, j.at("max_seconds").get<double>());
  if (j.contains("max_rank")) {
    const auto r = j.at("max_rank").get<std::size_t>();
    b.max_rank = b.max_rank == 0 ? r : std::min(b.max_rank, r);
  }
  if (b.max_states == 0 || b.max_seconds <= 0) throw HttpError{422, "budget values must be positive"};
  return b;
}

SolveResult Service::guarded_solve(const Graph& g, const SolveBudget& budget) {
  const auto want = std::min(budget.max_states, config_.global_state_limit);
  {
    std::unique_lock lock(budget_mutex_);
    budget_cv_.wait(lock, [&] { return states_reserved_ + want <= config_.global_state_limit; });
    states_reserved_ += want;
  }
  struct Release {
    Service* s;
    std::size_t n;
    ~Release() {
      {
        std::lock_guard lock(s->budget_mutex_);
        s->states_reserved_ -= n;
      }
      s->budget_cv_.notify_all();
    }
  } release{this, want};
  SolveOptions opts;
  opts.budget = budget;
  opts.budget.max_states = want;
  opts.threads = config_.solve_threads;
  return rlg::solve(g, opts);
}

ServiceResponse Service::solve(const nlohmann::json& body) {
  if (!body.contains("spec") || !body.at("spec").is_string()) throw HttpError{422, "missing spec"};
  const auto spec = body.at("spec").get<std::string>();
  const auto built = build(spec);
  const auto budget = budget_from(body);
  const auto r = guarded_solve(built->graph, budget);
  auto j = solve_result_to_json(built->graph, r, body.value("include_states", false));
  j["spec"] = built->spec;
  j["budget"] = {{"max_states", budget.max_states}, {"max_seconds", budget.max_seconds}, {"max_rank", budget.max_rank}};
  return {200, std::move(j)};
}

ServiceResponse Service::create_session(const nlohmann::json& body) {
  const auto mode = parse_mode(body);
  std::string spec;
  if (body.contains("spec")) {
    if (!body.at("spec").is_string()) throw HttpError{422, "spec must be a string"};
    spec = body.at("spec").get<std::string>();
  } else if (body.contains("transcript") && body.at("transcript").contains("graph") &&
             body.at("transcript").at("graph").is_string()) {
    spec = body.at("transcript").at("graph").get<std::string>();
  } else {
    throw HttpError{422, "missing spec"};
  }
  const auto built = build(spec);
  const auto solved = std::make_shared<const SolveResult>(guarded_solve(built->graph, budget_from(body)));

  if (body.contains("transcript") && mode != SessionMode::HumanCop)
    throw HttpError{422, "transcripts can only be imported into human-cop sessions"};
  auto session = std::make_shared<PlaySession>(std::string{}, spec, mode, built, solved);
  if (body.contains("transcript")) {
    // Import: replay, never trust stored states.
    for (const auto& r : body.at("transcript").at("rounds")) {
      const auto p = r.at("probe").get<long long>();
      if (p < 0 || static_cast<std::size_t>(p) >= built->graph.vertex_count())
        throw HttpError{422, "probe " + std::to_string(p) + " out of range"};
      if (session->transcript.cop_won()) throw HttpError{422, "rounds continue after the robber was located"};
      session->transcript.play(static_cast<Vertex>(p), r.at("answer").get<Distance>());
    }
  }
  {
    std::lock_guard lock(sessions_mutex_);
    if (sessions_.size() >= config_.max_sessions) return error(503, "session limit reached");
    do {
      session->id = random_id() + std::to_string(next_id_++);
    } while (sessions_.count(session->id) != 0);
    session->last_used = std::chrono::steady_clock::now();
    sessions_.emplace(session->id, session);
  }
  return {201, session->to_json()};
}

std::shared_ptr<PlaySession> Service::find(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError{404, "no session " + id};
  return it->second;
}

ServiceResponse Service::get_session(const std::string& id) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = std::chrono::steady_clock::now();
  return {200, s->to_json()};
}

ServiceResponse Service::delete_session(const std::string& id) {
  std::shared_ptr<PlaySession> s;
  {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw HttpError{404, "no session " + id};
    s = it->second;
    sessions_.erase(it);
  }
  std::lock_guard lock(s->mutex);
  const bool finished = s->transcript.cop_won();
  if (!finished) s->aborted = true;
  auto j = s->to_json();
  j["deleted"] = true;
  return {200, std::move(j)};
}

ServiceResponse Service::probe(const std::string& id, const nlohmann::json& body) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = std::chrono::steady_clock::now();
  if (s->mode != SessionMode::HumanCop) return error(409, "human-robber session: the engine probes; send /move");
  if (s->transcript.cop_won()) return error(409, "the robber is already located");
  const auto& g = s->built->graph;
  const Vertex v = parse_vertex(g, body);
  const auto partition = probe_partition(g, expand(g, s->transcript.current().candidates()), v);
  const auto answer = adversarial_answer(partition, s->solved.get());
  const auto& round = s->transcript.play(v, answer);
  return {200,
          {{"probe", v},
           {"answer", answer},
           {"candidates", vertex_set_to_json(round.state.candidates())},
           {"won", round.state.located()},
           {"round", s->transcript.rounds().size()},
           {"status", s->status()}}};
}

ServiceResponse Service::move(const std::string& id, const nlohmann::json& body) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = std::chrono::steady_clock::now();
  if (s->mode != SessionMode::HumanRobber) return error(409, "human-cop session: send /probe");
  if (s->transcript.cop_won()) return error(409, "the robber is already located");
  const auto& g = s->built->graph;
  const Vertex v = parse_vertex(g, body);
  if (s->robber && !g.closed_neighborhood(*s->robber).contains(v))
    return error(422, "vertex " + std::to_string(v) + " is not next to the robber at " + std::to_string(*s->robber));

  const auto& cur = s->transcript.current().candidates();
  const auto* move = s->solved->policy.find(cur);
  const bool optimal = move != nullptr && s->solved->verdict == Verdict::CopWins;
  const Vertex p = move != nullptr ? move->probe : largest_class_probe(g, expand(g, cur));
  const auto answer = g.distance(p, v);
  const auto& round = s->transcript.play(p, answer);
  s->robber = v;
  return {200,
          {{"robber", v},
           {"probe", p},
           {"answer", answer},
           {"candidates", vertex_set_to_json(round.state.candidates())},
           {"won", round.state.located()},
           {"non_optimal", !optimal},
           {"round", s->transcript.rounds().size()},
           {"status", s->status()}}};
}

std::size_t Service::session_count() {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

std::size_t Service::evict_idle() {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(sessions_mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock slock(it->second->mutex, std::try_to_lock);
    if (slock.owns_lock() && now - it->second->last_used > config_.idle_timeout) {
      it->second->aborted = !it->second->transcript.cop_won();
      slock.unlock();
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

void Service::age_session(const std::string& id, std::chrono::seconds age) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = std::chrono::steady_clock::now() - age;
}

struct HttpFrontend::Impl {
  httplib::Server server;
  std::thread thread;
  int port = -1;
};

HttpFrontend::HttpFrontend(Service& service) : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  server.set_payload_max_length(1 << 20);
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);
  server.Delete(R"(/api/.*)", forward);
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  impl_->port = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  return impl_->port;
}

void HttpFrontend::run() { impl_->server.listen_after_bind(); }

void HttpFrontend::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpFrontend::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace rlg
