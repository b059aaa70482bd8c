#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlg/graph.hpp"
#include "rlg/vertex_set.hpp"

namespace rlg {

/// An answer that no candidate could have produced, or a probe outside the
/// graph. Signals a corrupted transcript or a cheating adversary.
class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The cop's information after an answer: every vertex the robber could
/// occupy. Never empty.
class KnowledgeState {
 public:
  explicit KnowledgeState(VertexSet candidates);

  /// The state before the first round: the robber may be anywhere.
  static KnowledgeState initial(const Graph& g) { return KnowledgeState(g.all_vertices()); }

  const VertexSet& candidates() const { return candidates_; }
  std::size_t size() const { return candidates_.count(); }
  bool located() const { return candidates_.is_singleton(); }

  friend bool operator==(const KnowledgeState&, const KnowledgeState&) = default;

 private:
  VertexSet candidates_;
};

struct ProbeClass {
  Distance distance = 0;
  VertexSet members;
};

/// The split of an expanded candidate set by distance from the probe.
/// Classes are nonempty and listed by increasing distance.
struct ProbePartition {
  Vertex probe = 0;
  std::vector<ProbeClass> classes;

  const ProbeClass* find(Distance d) const;
  std::vector<Distance> answers() const;
};

/// N[S]: the robber moves to a neighbour or stays.
VertexSet expand(const Graph& g, const VertexSet& s);
KnowledgeState expand(const Graph& g, const KnowledgeState& s);

ProbePartition probe_partition(const Graph& g, const VertexSet& expanded, Vertex probe);

struct RoundOutcome {
  KnowledgeState state;
  bool cop_wins = false;
};

/// One full round: robber move, probe, answer. Throws GameError when the
/// answer is not a distance realised by any candidate.
RoundOutcome apply_round(const Graph& g, const KnowledgeState& s, Vertex probe, Distance answer);

struct TranscriptRound {
  Vertex probe = 0;
  Distance answer = 0;
  KnowledgeState state;
};

/// Ordered record of probes and answers. States are always recomputed from
/// the probes and answers; they are never read from serialized input.
class Transcript {
 public:
  /// `graph_descriptor` is either a builder spec string or an inline
  /// {"labels", "edges"} object; it is stored verbatim for export.
  Transcript(std::shared_ptr<const Graph> graph, nlohmann::json graph_descriptor);

  const Graph& graph() const { return *graph_; }
  std::shared_ptr<const Graph> shared_graph() const { return graph_; }
  const nlohmann::json& graph_descriptor() const { return descriptor_; }

  const std::vector<TranscriptRound>& rounds() const { return rounds_; }
  const KnowledgeState& current() const { return rounds_.empty() ? initial_ : rounds_.back().state; }
  bool cop_won() const { return current().located(); }

  const TranscriptRound& play(Vertex probe, Distance answer);

  nlohmann::json to_json() const;
  static Transcript from_json(const nlohmann::json& j);

 private:
  std::shared_ptr<const Graph> graph_;
  nlohmann::json descriptor_;
  KnowledgeState initial_;
  std::vector<TranscriptRound> rounds_;
};

nlohmann::json vertex_set_to_json(const VertexSet& s);
VertexSet vertex_set_from_json(const nlohmann::json& j, std::size_t universe);

}  // namespace rlg
