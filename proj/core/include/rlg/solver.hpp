#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlg/game.hpp"
#include "rlg/graph.hpp"

namespace rlg {

enum class Verdict { CopWins, RobberWins, Unknown };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

inline constexpr std::uint32_t kNoRank = std::numeric_limits<std::uint32_t>::max();

struct SolveBudget {
  std::size_t max_states = 5'000'000;
  double max_seconds = 60.0;
  /// Cap on fixpoint rounds; 0 means "number of explored states".
  std::size_t max_rank = 0;
};

struct SolveOptions {
  SolveBudget budget;
  /// Worker threads for exploration and fixpoint rounds. Results do not
  /// depend on this value.
  unsigned threads = 1;
  /// Also expand states that have an immediate win, and list every losing
  /// state in SolveResult::losing_states, so policy plus losing_states is
  /// the whole reachable state space. Slower; meant for exhaustive checks.
  bool explore_all = false;
};

struct SolveStats {
  std::size_t states_explored = 0;
  std::size_t transitions = 0;
  std::size_t fixpoint_iterations = 0;
  double wall_seconds = 0.0;
};

struct PolicyMove {
  Vertex probe = 0;
  std::uint32_t rank = 0;

  bool operator==(const PolicyMove&) const = default;
};

/// Probe choice per cop-winning knowledge state (|S| >= 2). A state's rank
/// is the worst-case number of probes the policy needs from it.
class CopPolicy {
 public:
  void set(VertexSet state, PolicyMove move) { moves_[std::move(state)] = move; }
  const PolicyMove* find(const VertexSet& state) const;
  std::size_t size() const { return moves_.size(); }
  bool empty() const { return moves_.empty(); }

  /// Entries ordered by member list, for stable export.
  std::vector<std::pair<VertexSet, PolicyMove>> sorted_entries() const;

  friend bool operator==(const CopPolicy&, const CopPolicy&) = default;

 private:
  std::unordered_map<VertexSet, PolicyMove, VertexSetHash> moves_;
};

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  /// Covers every cop-winning explored state, whatever the verdict.
  CopPolicy policy;
  /// Rank of the full vertex set (CopWins only).
  std::uint32_t capture_bound = 0;
  /// Explored states from which the cop cannot force a win, sorted by
  /// member list (RobberWins only). Contains the full vertex set.
  std::vector<VertexSet> certificate;
  /// Explored states outside the cop-win fixpoint, whatever the verdict
  /// (explore_all only).
  std::vector<VertexSet> losing_states;
  SolveStats stats;
  /// Why the result is Unknown.
  std::string budget_note;

  /// Singleton, or known to be in the cop-win fixpoint.
  bool cop_winning(const VertexSet& s) const { return s.is_singleton() || policy.find(s) != nullptr; }
};

/// Exact decision of locatability: explores the knowledge states reachable
/// from the full vertex set, then computes the ranked least fixpoint
///   W_0 = singletons,
///   W_{k+1} = W_k + { S : some probe sends every answer class into W_k }.
SolveResult solve(const Graph& g, const SolveOptions& options = {});

nlohmann::json solve_result_to_json(const Graph& g, const SolveResult& r, bool include_states = true);

struct PolicyCheck {
  bool ok = false;
  /// Exact worst-case number of probes when every branch terminates.
  std::optional<std::uint32_t> worst_case;
  /// Worst branch (success) or offending branch (failure) as (probe, answer) pairs.
  std::vector<std::pair<Vertex, Distance>> transcript;
  std::string error;
};

/// Exhaustive adversarial check of a policy from the full vertex set:
/// every answer branch must reach a singleton within `bound` probes.
PolicyCheck verify_policy(const Graph& g, const CopPolicy& policy, std::uint32_t bound);

/// True iff the family contains the full vertex set (or every first probe
/// from it admits an answer class in the family) and is closed: for every
/// member S and every probe there is an answer class of size >= 2 that is
/// itself a member.
bool verify_certificate(const Graph& g, const std::vector<VertexSet>& family);

/// Adversarial answer rule shared by verifiers and play sessions: prefer a
/// class outside the cop-win fixpoint, then the largest class, then the
/// class holding the smallest vertex index.
Distance adversarial_answer(const ProbePartition& partition, const SolveResult* known);

// ---------------------------------------------------------------------------

struct ParamRange {
  std::string name;
  int first = 0;
  int last = 0;
};

struct GridCell {
  std::map<std::string, int> params;
  std::string spec;
  Verdict verdict = Verdict::Unknown;
  std::optional<std::uint32_t> bound;
  SolveStats stats;
  std::string note;
};

struct GridResult {
  std::string family;
  /// Parameter names in the order the ranges were given.
  std::vector<std::string> param_names;
  std::vector<GridCell> cells;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Families: "kn" (n, m) for K_n^(1/m); "kab" (a, b, m) for K_{a,b}^(1/m);
/// "cycle" (n). Cells whose graph cannot be built are reported as Unknown
/// with a note; cells over budget are Unknown.
GridResult locatability_grid(const std::string& family, const std::vector<ParamRange>& ranges,
                             const SolveOptions& options = {});

/// Builder spec for one grid cell.
std::string grid_cell_spec(const std::string& family, const std::map<std::string, int>& params);

}  // namespace rlg
