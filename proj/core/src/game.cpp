#include "rlg/game.hpp"

namespace rlg {

KnowledgeState::KnowledgeState(VertexSet candidates) : candidates_(std::move(candidates)) {
  if (candidates_.empty()) throw GameError("knowledge state must be nonempty");
}

const ProbeClass* ProbePartition::find(Distance d) const {
  for (const auto& c : classes)
    if (c.distance == d) return &c;
  return nullptr;
}

std::vector<Distance> ProbePartition::answers() const {
  std::vector<Distance> out;
  out.reserve(classes.size());
  for (const auto& c : classes) out.push_back(c.distance);
  return out;
}

VertexSet expand(const Graph& g, const VertexSet& s) {
  VertexSet out(g.vertex_count());
  s.for_each([&](Vertex v) { out |= g.closed_neighborhood(v); });
  return out;
}

KnowledgeState expand(const Graph& g, const KnowledgeState& s) {
  return KnowledgeState(expand(g, s.candidates()));
}

ProbePartition probe_partition(const Graph& g, const VertexSet& expanded, Vertex probe) {
  if (probe >= g.vertex_count()) throw GameError("probe vertex out of range");
  ProbePartition p;
  p.probe = probe;
  const auto& layers = g.distance_layers(probe);
  for (Distance d = 0; d < layers.size(); ++d) {
    auto members = expanded & layers[d];
    if (!members.empty()) p.classes.push_back(ProbeClass{d, std::move(members)});
  }
  return p;
}

RoundOutcome apply_round(const Graph& g, const KnowledgeState& s, Vertex probe, Distance answer) {
  if (probe >= g.vertex_count()) throw GameError("probe vertex out of range");
  const auto& layers = g.distance_layers(probe);
  if (answer >= layers.size())
    throw GameError("answer " + std::to_string(answer) + " exceeds the probe's eccentricity");
  auto members = expand(g, s.candidates()) & layers[answer];
  if (members.empty())
    throw GameError("answer " + std::to_string(answer) + " is inconsistent with every candidate");
  const bool won = members.is_singleton();
  return RoundOutcome{KnowledgeState(std::move(members)), won};
}

// ---------------------------------------------------------------------------

Transcript::Transcript(std::shared_ptr<const Graph> graph, nlohmann::json graph_descriptor)
    : graph_(std::move(graph)),
      descriptor_(std::move(graph_descriptor)),
      initial_(KnowledgeState::initial(*graph_)) {}

const TranscriptRound& Transcript::play(Vertex probe, Distance answer) {
  auto outcome = apply_round(*graph_, current(), probe, answer);
  rounds_.push_back(TranscriptRound{probe, answer, std::move(outcome.state)});
  return rounds_.back();
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : rounds_) rounds.push_back({{"probe", r.probe}, {"answer", r.answer}});
  return {{"graph", descriptor_}, {"rounds", std::move(rounds)}};
}

Transcript Transcript::from_json(const nlohmann::json& j) {
  const auto& desc = j.at("graph");
  std::shared_ptr<const Graph> g;
  if (desc.is_string())
    g = std::make_shared<const Graph>(build_named(desc.get<std::string>()).graph);
  else
    g = std::make_shared<const Graph>(graph_from_json(desc));
  Transcript t(std::move(g), desc);
  for (const auto& r : j.at("rounds")) t.play(r.at("probe").get<Vertex>(), r.at("answer").get<Distance>());
  return t;
}

nlohmann::json vertex_set_to_json(const VertexSet& s) { return s.to_vector(); }

VertexSet vertex_set_from_json(const nlohmann::json& j, std::size_t universe) {
  const auto members = j.get<std::vector<Vertex>>();
  return VertexSet(universe, std::span<const Vertex>(members));
}

}  // namespace rlg
