#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlg/game.hpp"
#include "rlg/graph.hpp"

namespace rlg {

/// A strategy applied to a graph it does not fit, with parameters outside
/// its range, or reaching a situation none of its cases covers.
class StrategyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic cop state machine. The driver alternates next_probe and
/// observe; state_key serializes everything next_probe depends on besides
/// the knowledge state.
class CopStrategy {
 public:
  virtual ~CopStrategy() = default;

  virtual std::string name() const = 0;
  virtual std::unique_ptr<CopStrategy> clone() const = 0;

  /// Probe for the coming round. `k` is the knowledge after the last answer
  /// and has at least two candidates.
  virtual Vertex next_probe(const KnowledgeState& k) = 0;
  virtual void observe(Vertex probe, Distance answer, const KnowledgeState& after) = 0;
  virtual std::string state_key() const = 0;
};

/// Case table on H (cycle v1..v11 plus chord v3v9).
std::unique_ptr<CopStrategy> strategy_h(const Graph& g);

/// Name of the H case handling a two-vertex knowledge state ("i".."x"), the
/// opening positions ("opening", "after-v2", "after-v6-4"), or nullopt.
std::optional<std::string> strategy_h_case(const Graph& g, const VertexSet& state);

/// Probes leaves of K_{1,b} in index order.
std::unique_ptr<CopStrategy> strategy_star(const Graph& g, std::size_t b);
/// K_{2,b}^(1/2): neighbourhood / B-subset induction.
std::unique_ptr<CopStrategy> strategy_k2b_half(const Graph& g, std::size_t b);
/// K_{a,b}^(1/m), 3 <= a <= b, m >= max(3, a - 1): pin the robber into B,
/// then shrink the B-subset.
std::unique_ptr<CopStrategy> strategy_kab(const Graph& g, std::size_t a, std::size_t b, std::size_t m);
/// K_n^(1/m), m >= n/2 + 1 (or m >= n/2 and m >= 7): force the robber into
/// an original vertex, shrink the candidate originals to two, then locate.
std::unique_ptr<CopStrategy> strategy_kn(const Graph& g, std::size_t n, std::size_t m);

/// String ids: "H", "star", "k2b-half", "kab", "kn". Parameters are read
/// from the builder spec the graph was built from (e.g. "Kab:2,3/2").
std::unique_ptr<CopStrategy> make_strategy(const std::string& id, const BuiltGraph& built);
std::vector<std::string> strategy_ids();

struct StrategyCheck {
  bool wins = false;
  /// Exact worst-case number of probes (wins only).
  std::optional<std::uint32_t> capture_bound;
  /// Worst branch when the strategy wins, otherwise the evading branch.
  std::vector<std::pair<Vertex, Distance>> transcript;
  std::string error;
  std::size_t states_visited = 0;
};

/// Plays `s` against every answer sequence, memoized on
/// (strategy state, knowledge). Fails on a branch longer than `round_cap`,
/// on a repeated position (the robber can loop forever), on an invalid
/// probe, or when the strategy raises StrategyError.
StrategyCheck verify_cop_strategy(const Graph& g, const CopStrategy& s, std::uint32_t round_cap);

nlohmann::json strategy_check_to_json(const Graph& g, const std::string& strategy, const StrategyCheck& c);

// ---------------------------------------------------------------------------
// Robber side

/// Family of robber-favourable knowledge states. The robber keeps the cop's
/// knowledge a superset of some member; `lookahead` is the number of rounds
/// he may need to get back there.
struct EvasionFamily {
  std::vector<VertexSet> members;
  std::uint32_t lookahead = 1;
};

/// For every member S and every probe sequence of length <= lookahead there
/// is an answer path through states of size >= 2 ending in a superset of a
/// member. With a nonempty family this certifies the robber never loses.
bool verify_evasion_family(const Graph& g, const EvasionFamily& f);

class RobberAnswerPolicy {
 public:
  virtual ~RobberAnswerPolicy() = default;
  virtual std::string name() const = 0;
  /// A distance present in `partition`.
  virtual Distance choose_answer(const ProbePartition& partition) = 0;
};

/// Answers so that the knowledge stays above a member of the family: the
/// lowest distance whose class contains a member, else the lowest whose
/// class can reach one within the remaining lookahead, else the largest
/// class.
class FamilyAnswerPolicy : public RobberAnswerPolicy {
 public:
  FamilyAnswerPolicy(std::string name, const Graph& g, EvasionFamily family);

  std::string name() const override { return name_; }
  Distance choose_answer(const ProbePartition& partition) override;
  const EvasionFamily& family() const { return family_; }

 private:
  std::string name_;
  const Graph* graph_;
  EvasionFamily family_;
};

struct RobberPlan {
  std::unique_ptr<FamilyAnswerPolicy> policy;
  EvasionFamily family;
};

/// `cycle` lists the six vertices in cyclic order; empty picks one.
RobberPlan robber_policy_girth6(const Graph& g, std::vector<Vertex> cycle = {});
/// K_n^(1/m), m < n/2.
RobberPlan robber_policy_kn_small_m(const Graph& g, std::size_t n, std::size_t m);
/// K_{a,b}^(1/m): a, b >= 3 and m <= min(a, b) - 2, or m = 1 and a, b >= 2.
RobberPlan robber_policy_kab(const Graph& g, std::size_t a, std::size_t b, std::size_t m);
/// K_{a,b}^(1/2) with min(a, b) = 3.
RobberPlan robber_policy_ka3_half(const Graph& g, std::size_t a, std::size_t b);

/// Ids "girth6", "kn-small-m", "kab", "ka3-half"; parameters are read from
/// the builder spec as for make_strategy.
RobberPlan make_robber_plan(const std::string& id, const BuiltGraph& built);
std::vector<std::string> robber_plan_ids();

/// A six-cycle of g as a vertex list in cyclic order, if there is one.
std::optional<std::vector<Vertex>> find_six_cycle(const Graph& g);

nlohmann::json evasion_family_to_json(const EvasionFamily& f);
EvasionFamily evasion_family_from_json(const nlohmann::json& j, std::size_t universe);

}  // namespace rlg
