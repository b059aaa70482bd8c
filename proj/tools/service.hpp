#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rlg/game.hpp"
#include "rlg/graph.hpp"
#include "rlg/solver.hpp"

namespace rlg {

struct ServiceConfig {
  std::size_t max_sessions = 64;
  std::chrono::seconds idle_timeout{30 * 60};
  /// Largest graph a request may build.
  std::size_t max_vertices = 512;
  /// Budget used when a request gives none; requests may lower it but not
  /// raise it past these limits.
  SolveBudget budget{2'000'000, 20.0, 0};
  /// States all concurrent solves may hold together.
  std::size_t global_state_limit = 4'000'000;
  unsigned solve_threads = 1;
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

enum class SessionMode { HumanCop, HumanRobber };

/// One play session. In human-cop mode the engine answers adversarially; in
/// human-robber mode it tracks the true robber vertex and probes with the
/// solver policy (or a largest-class heuristic, flagged non-optimal).
struct PlaySession {
  std::string id;
  std::string spec;
  SessionMode mode = SessionMode::HumanCop;
  std::shared_ptr<const BuiltGraph> built;
  std::shared_ptr<const SolveResult> solved;
  Transcript transcript;
  std::optional<Vertex> robber;
  bool aborted = false;
  std::chrono::steady_clock::time_point last_used;
  std::mutex mutex;

  PlaySession(std::string id, std::string spec, SessionMode mode, std::shared_ptr<const BuiltGraph> built,
              std::shared_ptr<const SolveResult> solved);

  std::string status() const;
  nlohmann::json to_json() const;
};

/// Transport-free request handler; the HTTP server only forwards to it.
class Service {
 public:
  explicit Service(ServiceConfig config = {});

  ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body);

  std::size_t session_count();
  /// Drops sessions idle for longer than the timeout; returns how many.
  std::size_t evict_idle();
  /// For tests: pretend a session was last used `age` ago.
  void age_session(const std::string& id, std::chrono::seconds age);

  const ServiceConfig& config() const { return config_; }

 private:
  ServiceResponse builders() const;
  ServiceResponse solve(const nlohmann::json& body);
  ServiceResponse create_session(const nlohmann::json& body);
  ServiceResponse get_session(const std::string& id);
  ServiceResponse delete_session(const std::string& id);
  ServiceResponse probe(const std::string& id, const nlohmann::json& body);
  ServiceResponse move(const std::string& id, const nlohmann::json& body);

  std::shared_ptr<PlaySession> find(const std::string& id);
  std::shared_ptr<const BuiltGraph> build(const std::string& spec) const;
  SolveBudget budget_from(const nlohmann::json& body) const;
  SolveResult guarded_solve(const Graph& g, const SolveBudget& budget);

  ServiceConfig config_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<PlaySession>> sessions_;
  std::size_t next_id_ = 1;

  std::mutex budget_mutex_;
  std::condition_variable budget_cv_;
  std::size_t states_reserved_ = 0;
};

/// HTTP transport over a Service: every /api/* request is forwarded to
/// Service::handle.
class HttpFrontend {
 public:
  explicit HttpFrontend(Service& service);
  ~HttpFrontend();
  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  /// Port 0 picks a free one. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rlg
