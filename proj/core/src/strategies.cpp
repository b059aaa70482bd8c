#include "rlg/strategies.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <functional>
#include <map>
#include <limits>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace rlg {

namespace {

void require_graph(const Graph& g, const Graph& expected, const std::string& what) {
  if (!(g == expected)) throw StrategyError("graph does not match " + what);
}

std::size_t parse_size(std::string_view s, const std::string& spec) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw StrategyError("cannot read parameters from spec '" + spec + "'");
  return v;
}

/// "K:5/4" -> {"K", {5}, 4}; "Kab:2,3" -> {"Kab", {2, 3}, 1}.
struct FamilySpec {
  std::string family;
  std::vector<std::size_t> params;
  std::size_t m = 1;
};

FamilySpec parse_family_spec(const std::string& spec) {
  FamilySpec out;
  std::string_view body = spec;
  if (const auto slash = body.rfind('/'); slash != std::string_view::npos) {
    out.m = parse_size(body.substr(slash + 1), spec);
    body = body.substr(0, slash);
  }
  const auto colon = body.find(':');
  out.family = std::string(body.substr(0, colon));
  if (colon != std::string_view::npos) {
    auto rest = body.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.params.push_back(parse_size(rest.substr(0, comma), spec));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// H

struct HCase {
  const char* name;
  std::array<int, 2> pair;  // 1-based vertex numbers
  int probe;
};

// Situations in which the robber is known to be at one of two vertices.
constexpr std::array<HCase, 10> kHCases{{
    {"i", {2, 4}, 1},
    {"ii", {3, 4}, 9},
    {"iii", {3, 8}, 7},
    {"iv", {3, 9}, 10},
    {"v", {4, 5}, 6},
    {"vi", {5, 7}, 8},
    {"vii", {6, 8}, 6},
    {"viii", {4, 7}, 7},
    {"ix", {4, 8}, 9},
    {"x", {1, 11}, 2},
}};

// Opening: v6 first; answer 4 leaves {v2, v10}, probed at v2; answer 1 or
// 2 there leaves {v1, v3} or its mirror image {v11, v9}, probed at v6.
constexpr std::array<HCase, 3> kHOpening{{
    {"after-v6-4", {2, 10}, 2},
    {"after-v2", {1, 3}, 6},
    {"after-v2", {9, 11}, 6},
}};

VertexSet h_pair(const std::array<int, 2>& p) {
  return VertexSet(11, {static_cast<Vertex>(p[0] - 1), static_cast<Vertex>(p[1] - 1)});
}

const HCase* h_lookup(const VertexSet& s) {
  if (s.count() == 11) {
    static constexpr HCase kOpen{"opening", {0, 0}, 6};
    return &kOpen;
  }
  for (const auto& c : kHOpening)
    if (s.is_subset_of(h_pair(c.pair))) return &c;
  for (const auto& c : kHCases)
    if (s.is_subset_of(h_pair(c.pair))) return &c;
  return nullptr;
}

class HStrategy : public CopStrategy {
 public:
  std::string name() const override { return "H"; }
  std::unique_ptr<CopStrategy> clone() const override { return std::make_unique<HStrategy>(*this); }
  Vertex next_probe(const KnowledgeState& k) override {
    const auto* c = h_lookup(k.candidates());
    if (c == nullptr) throw StrategyError("no case of the H strategy covers " + k.candidates().to_string());
    return static_cast<Vertex>(c->probe - 1);
  }
  void observe(Vertex, Distance, const KnowledgeState&) override {}
  std::string state_key() const override { return {}; }
};

// ---------------------------------------------------------------------------
// Star

class StarStrategy : public CopStrategy {
 public:
  explicit StarStrategy(std::size_t b) : b_(b) {}
  std::string name() const override { return "star"; }
  std::unique_ptr<CopStrategy> clone() const override { return std::make_unique<StarStrategy>(*this); }
  Vertex next_probe(const KnowledgeState& k) override {
    for (Vertex leaf = 1; leaf <= b_; ++leaf)
      if (k.candidates().contains(leaf)) return leaf;
    throw StrategyError("star strategy: no leaf among the candidates");
  }
  void observe(Vertex, Distance, const KnowledgeState&) override {}
  std::string state_key() const override { return {}; }

 private:
  std::size_t b_;
};

// ---------------------------------------------------------------------------
// K_{2,b}^(1/2)

class K2bHalfStrategy : public CopStrategy {
 public:
  K2bHalfStrategy(SubdivisionMap map, std::size_t b) : map_(std::move(map)), b_(b) {}
  std::string name() const override { return "k2b-half"; }
  std::unique_ptr<CopStrategy> clone() const override { return std::make_unique<K2bHalfStrategy>(*this); }

  Vertex next_probe(const KnowledgeState& k) override {
    const auto& s = k.candidates();
    const Vertex x = 0;
    const Vertex y = 1;
    if (s.count() == s.universe()) return x;

    bool in_b = true, in_nx = true, in_ny = true;
    Vertex lowest_b = kNone, lowest_nx = kNone, lowest_ny = kNone;
    s.for_each([&](Vertex v) {
      if (v >= 2 && v < 2 + b_) {
        lowest_b = std::min(lowest_b, v);
        in_nx = in_ny = false;
        return;
      }
      in_b = false;
      const auto p = map_.locate(v);
      if (!p) {
        in_nx = in_ny = false;
        return;
      }
      const auto& th = map_.threads()[p->thread];
      const Vertex w = th.endpoint_v;  // endpoint_u is x or y
      if (th.endpoint_u == x) {
        in_ny = false;
        lowest_nx = std::min(lowest_nx, w);
      } else if (th.endpoint_u == y) {
        in_nx = false;
        lowest_ny = std::min(lowest_ny, w);
      }
    });
    // Robber in a subset of B: probe one of them.
    if (in_b) return lowest_b;
    // Robber among neighbours of x (or of y): probe an adjacent vertex of B.
    if (in_nx) return lowest_nx;
    if (in_ny) return lowest_ny;
    // Mixed neighbours of x and y, after a B probe answered 1 or 3.
    if (lowest_b == kNone) return x;
    throw StrategyError("k2b-half: no case covers " + s.to_string());
  }
  void observe(Vertex, Distance, const KnowledgeState&) override {}
  std::string state_key() const override { return {}; }

 private:
  static constexpr Vertex kNone = std::numeric_limits<Vertex>::max();
  SubdivisionMap map_;
  std::size_t b_;
};

// ---------------------------------------------------------------------------
// K_{a,b}^(1/m)

class KabStrategy : public CopStrategy {
 public:
  KabStrategy(SubdivisionMap map, std::size_t a, std::size_t b, std::size_t m)
      : map_(std::move(map)), a_(a), b_(b), m_(m) {}
  std::string name() const override { return "kab"; }
  std::unique_ptr<CopStrategy> clone() const override { return std::make_unique<KabStrategy>(*this); }

  Vertex next_probe(const KnowledgeState& k) override {
    const auto& s = k.candidates();
    const Vertex x = 0;

    // Robber known to be in a subset B' of B: probe the vertex adjacent to
    // y on x...y.
    if (all_of(s, [&](Vertex v) { return in_b(v); })) {
      stage_ = 2;
      return map_.vertex_on(s.first(), x, 1);
    }

    // Robber inside threads at one vertex of A: he can only leave through
    // it or through B, so probe the far ends in B in turn.
    if (const auto pin = common_a_end(s)) {
      Vertex best = kNone;
      s.for_each([&](Vertex v) { best = std::min(best, far_end(v, *pin)); });
      return best;
    }

    if (stage_ == 1) {
      const auto v = static_cast<Vertex>(next_a_);
      next_a_ = (next_a_ + 1) % a_;
      return v;
    }

    // Robber in threads away from x: probe vertices of A in turn, skipping
    // those with no candidate thread.
    Vertex best = kNone;
    bool ok = true;
    s.for_each([&](Vertex v) {
      const auto p = map_.locate(v);
      if (!p) {
        ok = false;
        return;
      }
      const auto& th = map_.threads()[p->thread];
      best = std::min(best, th.endpoint_u);
    });
    if (!ok || best == kNone || best == x) throw StrategyError("kab: no case covers " + s.to_string());
    return best;
  }
  void observe(Vertex, Distance, const KnowledgeState&) override {}
  std::string state_key() const override { return std::to_string(stage_) + ":" + std::to_string(next_a_); }

 private:
  static constexpr Vertex kNone = std::numeric_limits<Vertex>::max();

  template <class F>
  static bool all_of(const VertexSet& s, F&& f) {
    bool ok = true;
    s.for_each([&](Vertex v) { ok = ok && f(v); });
    return ok;
  }

  bool in_b(Vertex v) const { return v >= a_ && v < a_ + b_; }

  // Threads run from A (endpoint_u) to B (endpoint_v).
  std::optional<Vertex> common_a_end(const VertexSet& s) const {
    std::optional<Vertex> end;
    bool ok = true;
    s.for_each([&](Vertex v) {
      const auto p = map_.locate(v);
      if (!p) {
        ok = false;
        return;
      }
      const Vertex u = map_.threads()[p->thread].endpoint_u;
      if (end && *end != u) ok = false;
      end = u;
    });
    if (!ok) return std::nullopt;
    return end;
  }

  Vertex far_end(Vertex v, Vertex) const { return map_.threads()[map_.locate(v)->thread].endpoint_v; }

  SubdivisionMap map_;
  std::size_t a_, b_, m_;
  int stage_ = 1;
  std::size_t next_a_ = 0;
};

// ---------------------------------------------------------------------------
// K_n^(1/m)

class KnStrategy : public CopStrategy {
 public:
  KnStrategy(std::shared_ptr<const Graph> g, SubdivisionMap map, std::size_t n, std::size_t m)
      : graph_(std::move(g)), map_(std::move(map)), n_(n), m_(m) {}
  std::string name() const override { return "kn"; }
  std::unique_ptr<CopStrategy> clone() const override { return std::make_unique<KnStrategy>(*this); }

  Vertex next_probe(const KnowledgeState& k) override {
    const auto& s = k.candidates();

    if (all_original(s)) {
      if (s.count() == 2) {
        // Stage 3: the vertex at distance 1 from a on a...b.
        phase_ = Phase::Stage3;
        const Vertex a = s.first();
        Vertex b = a;
        s.for_each([&](Vertex v) { b = v; });
        pair_a_ = a;
        pair_b_ = b;
        return map_.vertex_on(a, b, 1);
      }
      // Stage 2: try to eliminate the lowest candidate original.
      phase_ = Phase::Stage2;
      center_ = s.first();
      cands_ = 0;
      s.for_each([&](Vertex v) { cands_ |= std::uint64_t{1} << v; });
      return center_;
    }

    switch (phase_) {
      case Phase::Stage1: {
        const auto v = static_cast<Vertex>(next_original_);
        next_original_ = (next_original_ + 1) % n_;
        return v;
      }
      case Phase::ForceBack:
        return force_back_probe(s);
      case Phase::Leaving:
        return leaving_probe(s);
      case Phase::Pursuit:
        return pursuit_probe(s);
      default:
        break;
    }
    throw StrategyError("kn: no case covers " + s.to_string());
  }

  void observe(Vertex probe, Distance answer, const KnowledgeState& after) override {
    const auto m = static_cast<Distance>(m_);
    switch (phase_) {
      case Phase::Stage2:
        if (answer == 1) {
          start_pursuit(center_);
        } else if (answer == m - 1) {
          start_force_back(center_, false);
        } else if (answer == m + 1) {
          phase_ = Phase::Leaving;
        }
        break;
      case Phase::Stage3: {
        const auto& s = after.candidates();
        if (pursuit_shape(s, pair_a_))
          start_pursuit(pair_a_);
        else
          start_pursuit(pair_b_);
        break;
      }
      case Phase::ForceBack:
        next_is_center_ = !next_is_center_;
        break;
      case Phase::Leaving:
        if (map_.is_original(probe) && answer > 0 && answer < m) start_force_back(probe, false);
        break;
      case Phase::Pursuit:
        pursuit_step_ = 1;
        break;
      default:
        break;
    }
  }

  std::string state_key() const override {
    std::ostringstream os;
    os << static_cast<int>(phase_) << ':' << next_original_ << ':' << center_ << ':' << cands_ << ':'
       << next_is_center_ << ':' << pursuit_step_ << ':' << pair_a_ << ':' << pair_b_;
    return os.str();
  }

 private:
  enum class Phase { Stage1, Stage2, Stage3, ForceBack, Leaving, Pursuit };

  struct Spot {
    Vertex x;
    Vertex y;
    std::size_t off;  // distance from x
  };

  bool all_original(const VertexSet& s) const {
    bool ok = true;
    s.for_each([&](Vertex v) { ok = ok && map_.is_original(v); });
    return ok;
  }

  Spot spot(Vertex v) const {
    const auto p = map_.locate(v);
    const auto& th = map_.threads()[p->thread];
    return {th.endpoint_u, th.endpoint_v, p->offset};
  }

  void start_pursuit(Vertex origin) {
    phase_ = Phase::Pursuit;
    center_ = origin;
    pursuit_step_ = 0;
  }

  void start_force_back(Vertex center, bool center_first) {
    phase_ = Phase::ForceBack;
    center_ = center;
    next_is_center_ = center_first;
  }

  /// Far ends of the candidate threads at `o`, the one the robber could
  /// reach soonest first (ties by index); nullopt when some candidate is off
  /// those threads.
  std::optional<std::vector<Vertex>> pursuit_shape(const VertexSet& s, Vertex o) const {
    std::vector<int> reach(n_, -1);  // furthest candidate offset from o
    bool ok = true;
    s.for_each([&](Vertex v) {
      if (v == o) return;
      if (map_.is_original(v)) {
        reach[v] = static_cast<int>(m_);
        return;
      }
      const auto sp = spot(v);
      if (sp.x == o)
        reach[sp.y] = std::max(reach[sp.y], static_cast<int>(sp.off));
      else if (sp.y == o)
        reach[sp.x] = std::max(reach[sp.x], static_cast<int>(m_ - sp.off));
      else
        ok = false;
    });
    if (!ok) return std::nullopt;
    std::vector<Vertex> out;
    for (Vertex w = 0; w < n_; ++w)
      if (reach[w] >= 0) out.push_back(w);
    std::stable_sort(out.begin(), out.end(), [&](Vertex a, Vertex b) { return reach[a] > reach[b]; });
    return out;
  }

  // Robber heading into the center from the far ends: alternate the center
  // and the far ends in index order until he is back at a far end.
  Vertex force_back_probe(const VertexSet& s) {
    const auto ends = pursuit_shape(s, center_);
    if (!ends || ends->empty()) throw StrategyError("kn: force-back lost the robber at " + s.to_string());
    if (next_is_center_) return center_;
    return ends->front();
  }

  // Case m+1: the robber left some candidate v_i for an unknown v_j. First
  // rule out eliminated originals as destinations (single probes while he
  // may still be next to v_i, then midpoint pairs), then probe candidate
  // originals until one end of his thread is found.
  Vertex leaving_probe(const VertexSet& s) {
    const auto p = center_;
    auto is_source = [&](Vertex v) { return v != p && ((cands_ >> v) & 1U) != 0; };
    auto is_eliminated = [&](Vertex v) { return ((cands_ >> v) & 1U) == 0; };

    std::vector<bool> dest_live(n_, false);
    std::vector<bool> source_live(n_, false);
    bool first_layer = false;
    s.for_each([&](Vertex v) {
      if (map_.is_original(v)) return;
      const auto sp = spot(v);
      for (const auto& [end, other, off] : {std::tuple{sp.x, sp.y, sp.off}, std::tuple{sp.y, sp.x, m_ - sp.off}}) {
        if (is_eliminated(other) && is_source(end)) {
          dest_live[other] = true;
          if (off <= 1) first_layer = true;
        }
        if (is_source(end)) source_live[end] = true;
      }
    });
    std::vector<Vertex> dests;
    for (Vertex w = 0; w < n_; ++w)
      if (dest_live[w]) dests.push_back(w);

    if (dests.size() == 1) {
      // Heading for this eliminated original only: force him back.
      const Vertex e = dests.front();
      bool all_there = true;
      s.for_each([&](Vertex v) {
        if (map_.is_original(v)) {
          all_there = false;
          return;
        }
        const auto sp = spot(v);
        all_there = all_there && (sp.x == e || sp.y == e);
      });
      if (all_there) {
        start_force_back(e, true);
        return force_back_probe(s);
      }
    }
    if (!dests.empty()) {
      if (first_layer || dests.size() == 1) return dests.front();
      // Known to be heading for the pair: a single probe tells which.
      bool in_pair = true;
      s.for_each([&](Vertex v) {
        if (map_.is_original(v)) return;
        const auto sp = spot(v);
        in_pair = in_pair && (sp.x == dests[0] || sp.y == dests[0] || sp.x == dests[1] || sp.y == dests[1]);
      });
      if (in_pair) return dests.front();
      return pair_probe(dests[0], dests[1], false);
    }
    for (Vertex c = 0; c < n_; ++c)
      if (source_live[c]) return c;
    throw StrategyError("kn: lost the robber after he left a candidate, at " + s.to_string());
  }

  /// Midpoint (m even) or near-midpoint on c...d; `shifted` moves one step
  /// further towards c for odd m.
  Vertex pair_probe(Vertex c, Vertex d, bool shifted) const {
    if (m_ % 2 == 0) return map_.vertex_on(c, d, m_ / 2);
    return map_.vertex_on(c, d, shifted ? (m_ - 3) / 2 : (m_ - 1) / 2);
  }

  // Robber left a known original: eliminate destinations two per probe,
  // then probe at distance 2 from v along the center...v thread. Among the
  // probes of those kinds the one with the least damaging worst answer is
  // used; the proof's own choice comes first and wins ties.
  Vertex pursuit_probe(const VertexSet& s) {
    auto ends = pursuit_shape(s, center_);
    if (!ends) {
      // Left some other original (Stage 3 answers can mix a and b): follow
      // him from there.
      for (Vertex o = 0; o < n_ && !ends; ++o) {
        if (s.contains(o)) continue;
        if ((ends = pursuit_shape(s, o))) start_pursuit(o);
      }
    }
    if (!ends || ends->empty()) throw StrategyError("kn: pursuit lost the robber at " + s.to_string());
    const auto& d = *ends;

    std::vector<Vertex> options;
    if (d.size() >= 3) options.push_back(pair_probe(d[0], d[1], pursuit_step_ == 0 && m_ % 2 == 1));
    if (d.size() == 2) options.push_back(map_.vertex_on(d[0], center_, 2));
    if (d.size() == 1) options.push_back(d[0]);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (i == j) continue;
        options.push_back(pair_probe(d[i], d[j], false));
        if (m_ % 2 == 1 && m_ >= 3) options.push_back(pair_probe(d[i], d[j], true));
      }
      options.push_back(map_.vertex_on(d[i], center_, 2));
      options.push_back(d[i]);
    }

    const auto e = expand(*graph_, s);
    Vertex best = options.front();
    std::optional<Damage> best_damage;
    for (auto v : options) {
      const auto dmg = damage(probe_partition(*graph_, e, v));
      if (!best_damage || dmg < *best_damage) {
        best = v;
        best_damage = dmg;
      }
    }
    return best;
  }

  /// Worst answer class: probes still needed against the steps the robber
  /// needs to reach a live destination, then sharing a class with the
  /// origin (he may have returned and can leave along any thread), then the
  /// number of live destinations and the class size.
  using Damage = std::tuple<int, int, std::size_t, std::size_t>;

  Damage damage(const ProbePartition& p) const {
    Damage worst{std::numeric_limits<int>::min(), 0, 0, 0};
    for (const auto& c : p.classes) {
      if (c.members.count() < 2) continue;
      const int with_origin = c.members.contains(center_) ? 1 : 0;
      std::size_t live = n_ - 1;
      int reach = 0;
      if (const auto r = reach_of(c.members, center_)) {
        live = with_origin ? n_ - 1 : r->first;
        reach = r->second;
      } else {
        live = n_;
        reach = static_cast<int>(m_);
      }
      const int deficit = static_cast<int>(live) - 2 * (static_cast<int>(m_) - reach);
      worst = std::max(worst, Damage{deficit, with_origin, static_cast<std::size_t>(reach), c.members.count()});
    }
    return worst;
  }

  /// Live destination count and furthest offset, as in pursuit_shape.
  std::optional<std::pair<std::size_t, int>> reach_of(const VertexSet& s, Vertex o) const {
    std::vector<int> reach(n_, -1);
    bool ok = true;
    s.for_each([&](Vertex v) {
      if (v == o) return;
      if (map_.is_original(v)) {
        reach[v] = static_cast<int>(m_);
        return;
      }
      const auto sp = spot(v);
      if (sp.x == o)
        reach[sp.y] = std::max(reach[sp.y], static_cast<int>(sp.off));
      else if (sp.y == o)
        reach[sp.x] = std::max(reach[sp.x], static_cast<int>(m_ - sp.off));
      else
        ok = false;
    });
    if (!ok) return std::nullopt;
    std::size_t live = 0;
    int far = 0;
    for (auto r : reach)
      if (r >= 0) {
        ++live;
        far = std::max(far, r);
      }
    return std::pair{live, far};
  }

  std::shared_ptr<const Graph> graph_;
  SubdivisionMap map_;
  std::size_t n_, m_;
  Phase phase_ = Phase::Stage1;
  std::size_t next_original_ = 0;
  Vertex center_ = 0;
  std::uint64_t cands_ = 0;
  bool next_is_center_ = false;
  int pursuit_step_ = 0;
  Vertex pair_a_ = 0;
  Vertex pair_b_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------

std::unique_ptr<CopStrategy> strategy_h(const Graph& g) {
  require_graph(g, graph_h(), "H");
  return std::make_unique<HStrategy>();
}

std::optional<std::string> strategy_h_case(const Graph& g, const VertexSet& state) {
  require_graph(g, graph_h(), "H");
  const auto* c = h_lookup(state);
  if (c == nullptr) return std::nullopt;
  return std::string(c->name);
}

std::unique_ptr<CopStrategy> strategy_star(const Graph& g, std::size_t b) {
  if (b < 1) throw StrategyError("star needs at least one leaf");
  require_graph(g, complete_bipartite(1, b), "K_{1," + std::to_string(b) + "}");
  return std::make_unique<StarStrategy>(b);
}

std::unique_ptr<CopStrategy> strategy_k2b_half(const Graph& g, std::size_t b) {
  if (b < 2) throw StrategyError("k2b-half needs b >= 2");
  auto sub = subdivide(complete_bipartite(2, b), 2);
  require_graph(g, sub.graph, "K_{2," + std::to_string(b) + "}^(1/2)");
  return std::make_unique<K2bHalfStrategy>(std::move(sub.map), b);
}

std::unique_ptr<CopStrategy> strategy_kab(const Graph& g, std::size_t a, std::size_t b, std::size_t m) {
  if (a < 3 || a > b) throw StrategyError("kab needs 3 <= a <= b");
  if (m < 3 || m + 1 < a) throw StrategyError("kab needs m >= 3 and m >= a - 1");
  auto sub = subdivide(complete_bipartite(a, b), m);
  require_graph(g, sub.graph, "K_{" + std::to_string(a) + "," + std::to_string(b) + "}^(1/" + std::to_string(m) + ")");
  return std::make_unique<KabStrategy>(std::move(sub.map), a, b, m);
}

std::unique_ptr<CopStrategy> strategy_kn(const Graph& g, std::size_t n, std::size_t m) {
  if (n < 3 || n > 64) throw StrategyError("kn needs 3 <= n <= 64");
  if (!(2 * m >= n + 2 || (2 * m >= n && m >= 7))) throw StrategyError("kn needs m >= n/2 + 1, or m >= n/2 and m >= 7");
  auto sub = subdivide(complete_graph(n), m);
  require_graph(g, sub.graph, "K_" + std::to_string(n) + "^(1/" + std::to_string(m) + ")");
  return std::make_unique<KnStrategy>(std::make_shared<const Graph>(std::move(sub.graph)), std::move(sub.map), n, m);
}

std::vector<std::string> strategy_ids() { return {"H", "star", "k2b-half", "kab", "kn"}; }

std::unique_ptr<CopStrategy> make_strategy(const std::string& id, const BuiltGraph& built) {
  const auto& g = built.graph;
  if (id == "H") return strategy_h(g);
  const auto spec = parse_family_spec(built.spec);
  auto need = [&](const std::string& family, std::size_t count) {
    if (spec.family != family || spec.params.size() != count)
      throw StrategyError("strategy '" + id + "' does not apply to '" + built.spec + "'");
  };
  if (id == "star") {
    need("Kab", 2);
    if (spec.params[0] != 1 || spec.m != 1) throw StrategyError("star needs Kab:1,b");
    return strategy_star(g, spec.params[1]);
  }
  if (id == "k2b-half") {
    need("Kab", 2);
    if (spec.params[0] != 2 || spec.m != 2) throw StrategyError("k2b-half needs Kab:2,b/2");
    return strategy_k2b_half(g, spec.params[1]);
  }
  if (id == "kab") {
    need("Kab", 2);
    return strategy_kab(g, spec.params[0], spec.params[1], spec.m);
  }
  if (id == "kn") {
    need("K", 1);
    return strategy_kn(g, spec.params[0], spec.m);
  }
  throw StrategyError("unknown strategy '" + id + "'");
}

// ---------------------------------------------------------------------------
// Verification

namespace {

class StrategyVerifier {
 public:
  StrategyVerifier(const Graph& g, std::uint32_t cap) : g_(g), cap_(cap) {}

  StrategyCheck run(const CopStrategy& s) {
    StrategyCheck out;
    const auto root = KnowledgeState::initial(g_);
    const auto r = visit(s.clone(), root, 0);
    out.states_visited = memo_.size();
    if (!r) {
      out.error = error_;
      out.transcript = fail_path_;
      return out;
    }
    out.wins = true;
    out.capture_bound = *r;
    // Replay the worst branch.
    auto cur = s.clone();
    auto k = root;
    while (!k.located()) {
      const auto& e = memo_.at(key(*cur, k));
      const Vertex probe = cur->next_probe(k);
      out.transcript.emplace_back(probe, e.worst_answer);
      auto outcome = apply_round(g_, k, probe, e.worst_answer);
      cur->observe(probe, e.worst_answer, outcome.state);
      k = std::move(outcome.state);
    }
    return out;
  }

 private:
  struct Entry {
    std::uint32_t remaining = 0;
    Distance worst_answer = 0;
  };

  static std::string key(const CopStrategy& s, const KnowledgeState& k) {
    std::string out = s.state_key();
    out += '|';
    for (auto w : k.candidates().words()) {
      out.append(reinterpret_cast<const char*>(&w), sizeof w);
    }
    return out;
  }

  std::optional<std::uint32_t> fail(std::string why) {
    error_ = std::move(why);
    fail_path_ = path_;
    return std::nullopt;
  }

  std::optional<std::uint32_t> visit(std::unique_ptr<CopStrategy> s, const KnowledgeState& k, std::uint32_t depth) {
    if (k.located()) return 0;
    const auto id = key(*s, k);
    if (const auto it = memo_.find(id); it != memo_.end()) {
      if (depth + it->second.remaining > cap_) return fail("round cap " + std::to_string(cap_) + " exceeded");
      return it->second.remaining;
    }
    if (on_stack_.count(id) != 0) return fail("robber can repeat a position forever");
    if (depth >= cap_) return fail("round cap " + std::to_string(cap_) + " exceeded");

    Vertex probe = 0;
    try {
      probe = s->next_probe(k);
    } catch (const StrategyError& e) {
      return fail(e.what());
    }
    if (probe >= g_.vertex_count()) return fail("strategy emitted invalid probe " + std::to_string(probe));

    on_stack_.insert(id);
    const auto partition = probe_partition(g_, expand(g_, k.candidates()), probe);
    Entry best;
    for (const auto& cls : partition.classes) {
      auto child = s->clone();
      KnowledgeState next(cls.members);
      try {
        child->observe(probe, cls.distance, next);
      } catch (const StrategyError& e) {
        path_.emplace_back(probe, cls.distance);
        return fail(e.what());
      }
      path_.emplace_back(probe, cls.distance);
      const auto r = visit(std::move(child), next, depth + 1);
      if (!r) return std::nullopt;
      path_.pop_back();
      if (*r + 1 > best.remaining) best = Entry{*r + 1, cls.distance};
    }
    on_stack_.erase(id);
    memo_.emplace(id, best);
    return best.remaining;
  }

  const Graph& g_;
  std::uint32_t cap_;
  std::unordered_map<std::string, Entry> memo_;
  std::unordered_set<std::string> on_stack_;
  std::vector<std::pair<Vertex, Distance>> path_;
  std::vector<std::pair<Vertex, Distance>> fail_path_;
  std::string error_;
};

}  // namespace

StrategyCheck verify_cop_strategy(const Graph& g, const CopStrategy& s, std::uint32_t round_cap) {
  return StrategyVerifier(g, round_cap).run(s);
}

nlohmann::json strategy_check_to_json(const Graph& g, const std::string& strategy, const StrategyCheck& c) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& [probe, answer] : c.transcript)
    rounds.push_back({{"probe", probe}, {"probe_label", g.label(probe)}, {"answer", answer}});
  nlohmann::json j{{"strategy", strategy},
                   {"wins", c.wins},
                   {"capture_bound", nullptr},
                   {"transcript", std::move(rounds)},
                   {"states_visited", c.states_visited}};
  if (c.capture_bound) j["capture_bound"] = *c.capture_bound;
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

// ---------------------------------------------------------------------------
// Robber side

namespace {

class FamilyChecker {
 public:
  FamilyChecker(const Graph& g, const std::vector<VertexSet>& members) : g_(g), members_(members) {}

  bool covered(const VertexSet& s) const {
    return std::any_of(members_.begin(), members_.end(), [&](const VertexSet& f) { return f.is_subset_of(s); });
  }

  /// Some answer to every probe keeps the robber above a member within
  /// `rounds` rounds.
  bool holds(const VertexSet& s, std::uint32_t rounds) {
    const auto memo_key = std::make_pair(s, rounds);
    if (const auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    const auto e = expand(g_, s);
    bool ok = true;
    for (Vertex v = 0; v < g_.vertex_count() && ok; ++v) {
      const auto p = probe_partition(g_, e, v);
      ok = std::any_of(p.classes.begin(), p.classes.end(), [&](const ProbeClass& c) { return good_class(c.members, rounds); });
    }
    memo_.emplace(memo_key, ok);
    return ok;
  }

  bool good_class(const VertexSet& c, std::uint32_t rounds) {
    if (c.count() < 2) return false;
    return covered(c) || (rounds > 1 && holds(c, rounds - 1));
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<VertexSet, std::uint32_t>& k) const {
      return k.first.hash() ^ (std::size_t{k.second} * 0x9e3779b97f4a7c15ULL);
    }
  };

  const Graph& g_;
  const std::vector<VertexSet>& members_;
  std::unordered_map<std::pair<VertexSet, std::uint32_t>, bool, KeyHash> memo_;
};

VertexSet set_of(std::size_t universe, std::initializer_list<Vertex> vs) { return VertexSet(universe, vs); }

/// Vertices at distance `level` from `from` along the threads to each of `to`.
VertexSet level_set(const SubdivisionMap& map, std::size_t universe, Vertex from, const std::vector<Vertex>& to,
                    std::size_t level) {
  VertexSet s(universe);
  for (auto w : to) s.insert(map.vertex_on(from, w, level));
  return s;
}

/// All subsets of `items` with exactly `size` elements.
void for_each_subset(const std::vector<Vertex>& items, std::size_t size,
                     const std::function<void(const std::vector<Vertex>&)>& f) {
  std::vector<Vertex> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (cur.size() == size) {
      f(cur);
      return;
    }
    if (items.size() - i < size - cur.size()) return;
    cur.push_back(items[i]);
    rec(i + 1);
    cur.pop_back();
    rec(i + 1);
  };
  rec(0);
}

void add_pairs(std::vector<VertexSet>& out, std::size_t universe, const std::vector<Vertex>& part) {
  for (std::size_t i = 0; i < part.size(); ++i)
    for (std::size_t j = i + 1; j < part.size(); ++j) out.push_back(set_of(universe, {part[i], part[j]}));
}

void dedupe(std::vector<VertexSet>& f) {
  std::sort(f.begin(), f.end(), member_order_less);
  f.erase(std::unique(f.begin(), f.end()), f.end());
}

/// Largest subfamily closed under verify_evasion_family's condition.
std::vector<VertexSet> prune_to_closure(const Graph& g, std::vector<VertexSet> f, std::uint32_t lookahead) {
  while (true) {
    FamilyChecker check(g, f);
    std::vector<VertexSet> keep;
    for (const auto& s : f)
      if (check.holds(s, lookahead)) keep.push_back(s);
    if (keep.size() == f.size()) return f;
    f = std::move(keep);
  }
}

std::vector<Vertex> range(Vertex first, Vertex last) {
  std::vector<Vertex> out;
  for (Vertex v = first; v < last; ++v) out.push_back(v);
  return out;
}

}  // namespace

bool verify_evasion_family(const Graph& g, const EvasionFamily& f) {
  if (f.members.empty() || f.lookahead == 0) return false;
  for (const auto& s : f.members)
    if (s.universe() != g.vertex_count() || s.count() < 2) return false;
  FamilyChecker check(g, f.members);
  return std::all_of(f.members.begin(), f.members.end(), [&](const VertexSet& s) { return check.holds(s, f.lookahead); });
}

FamilyAnswerPolicy::FamilyAnswerPolicy(std::string name, const Graph& g, EvasionFamily family)
    : name_(std::move(name)), graph_(&g), family_(std::move(family)) {}

Distance FamilyAnswerPolicy::choose_answer(const ProbePartition& partition) {
  if (partition.classes.empty()) throw GameError("empty partition");
  FamilyChecker check(*graph_, family_.members);
  for (const auto& c : partition.classes)
    if (c.members.count() >= 2 && check.covered(c.members)) return c.distance;
  if (family_.lookahead > 1)
    for (const auto& c : partition.classes)
      if (check.good_class(c.members, family_.lookahead)) return c.distance;
  const ProbeClass* best = &partition.classes.front();
  for (const auto& c : partition.classes)
    if (c.members.count() > best->members.count()) best = &c;
  return best->distance;
}

std::optional<std::vector<Vertex>> find_six_cycle(const Graph& g) {
  const auto n = static_cast<Vertex>(g.vertex_count());
  std::vector<Vertex> path;
  std::vector<bool> used(n, false);
  std::function<bool(Vertex)> extend = [&](Vertex v) -> bool {
    if (path.size() == 6) return g.adjacent(v, path.front());
    for (auto w : g.neighbors(v)) {
      if (used[w] || w < path.front()) continue;
      used[w] = true;
      path.push_back(w);
      if (extend(w)) return true;
      path.pop_back();
      used[w] = false;
    }
    return false;
  };
  for (Vertex s = 0; s < n; ++s) {
    path = {s};
    std::fill(used.begin(), used.end(), false);
    used[s] = true;
    if (extend(s)) return path;
  }
  return std::nullopt;
}

RobberPlan robber_policy_girth6(const Graph& g, std::vector<Vertex> cycle) {
  if (!is_bipartite(g)) throw StrategyError("girth-6 policy needs a bipartite graph");
  if (girth(g) != 6) throw StrategyError("girth-6 policy needs girth exactly 6");
  if (cycle.empty()) {
    auto found = find_six_cycle(g);
    if (!found) throw StrategyError("no six-cycle found");
    cycle = std::move(*found);
  }
  if (cycle.size() != 6) throw StrategyError("cycle must list six vertices");
  for (std::size_t i = 0; i < 6; ++i) {
    if (cycle[i] >= g.vertex_count()) throw StrategyError("cycle vertex out of range");
    if (!g.adjacent(cycle[i], cycle[(i + 1) % 6])) throw StrategyError("cycle vertices are not consecutive neighbours");
    for (std::size_t j = i + 1; j < 6; ++j)
      if (cycle[i] == cycle[j]) throw StrategyError("cycle repeats a vertex");
  }
  EvasionFamily f;
  for (std::size_t i = 0; i < 6; ++i) {
    f.members.push_back(set_of(g.vertex_count(), {cycle[i], cycle[(i + 2) % 6]}));
    if (i < 3) f.members.push_back(set_of(g.vertex_count(), {cycle[i], cycle[i + 3]}));
  }
  dedupe(f.members);
  f.lookahead = 1;
  RobberPlan plan;
  plan.family = f;
  plan.policy = std::make_unique<FamilyAnswerPolicy>("girth6", g, std::move(f));
  return plan;
}

RobberPlan robber_policy_kn_small_m(const Graph& g, std::size_t n, std::size_t m) {
  if (n < 3 || 2 * m >= n) throw StrategyError("Kn robber policy needs m < n/2");
  if (n > 12) throw StrategyError("Kn robber policy family is enumerated only for n <= 12");
  const auto universe = g.vertex_count();
  std::optional<SubdivisionMap> map;
  if (m > 1) {
    auto sub = subdivide(complete_graph(n), m);
    require_graph(g, sub.graph, "K_" + std::to_string(n) + "^(1/" + std::to_string(m) + ")");
    map = std::move(sub.map);
  } else {
    require_graph(g, complete_graph(n), "K_" + std::to_string(n));
  }
  const auto originals = range(0, static_cast<Vertex>(n));

  // Pairs of originals, plus the robber heading out of a along several
  // threads at once, possibly having turned back part of the way.
  std::vector<VertexSet> f;
  add_pairs(f, universe, originals);
  if (map) {
    for (Vertex a = 0; a < n; ++a) {
      std::vector<Vertex> others;
      for (auto v : originals)
        if (v != a) others.push_back(v);
      for (std::size_t size = 2; size <= others.size(); ++size) {
        for_each_subset(others, size, [&](const std::vector<Vertex>& r) {
          for (std::size_t level = 1; level < m; ++level) {
            const auto lev = level_set(*map, universe, a, r, level);
            f.push_back(lev);
            for (std::size_t back = 0; back < level; ++back) {
              auto mix = lev;
              mix |= back == 0 ? set_of(universe, {a}) : level_set(*map, universe, a, r, back);
              f.push_back(mix);
            }
          }
        });
      }
    }
  }
  dedupe(f);
  EvasionFamily fam{prune_to_closure(g, std::move(f), 1), 1};
  RobberPlan plan;
  plan.family = fam;
  plan.policy = std::make_unique<FamilyAnswerPolicy>("kn-small-m", g, std::move(fam));
  return plan;
}

RobberPlan robber_policy_kab(const Graph& g, std::size_t a, std::size_t b, std::size_t m) {
  const bool small = m == 1 && a >= 2 && b >= 2;
  if (!small && !(a >= 3 && b >= 3 && m + 2 <= std::min(a, b)))
    throw StrategyError("Kab robber policy needs a, b >= 3 and m <= min(a, b) - 2, or m = 1");
  const auto universe = g.vertex_count();
  std::optional<SubdivisionMap> map;
  if (m > 1) {
    auto sub = subdivide(complete_bipartite(a, b), m);
    require_graph(g, sub.graph, "K_{a,b}^(1/m)");
    map = std::move(sub.map);
  } else {
    require_graph(g, complete_bipartite(a, b), "K_{a,b}");
  }
  const auto part_a = range(0, static_cast<Vertex>(a));
  const auto part_b = range(static_cast<Vertex>(a), static_cast<Vertex>(a + b));

  // Same-part pairs, and the robber l steps out of u along all but l - 1
  // of its threads.
  std::vector<VertexSet> f;
  add_pairs(f, universe, part_a);
  add_pairs(f, universe, part_b);
  if (map) {
    for (int side = 0; side < 2; ++side) {
      const auto& from = side == 0 ? part_a : part_b;
      const auto& to = side == 0 ? part_b : part_a;
      for (auto u : from)
        for (std::size_t l = 1; l < m; ++l)
          for_each_subset(to, std::max<std::size_t>(2, to.size() - l),
                          [&](const std::vector<Vertex>& r) { f.push_back(level_set(*map, universe, u, r, l)); });
    }
  }
  dedupe(f);
  EvasionFamily fam{std::move(f), 1};
  RobberPlan plan;
  plan.family = fam;
  plan.policy = std::make_unique<FamilyAnswerPolicy>("kab", g, std::move(fam));
  return plan;
}

RobberPlan robber_policy_ka3_half(const Graph& g, std::size_t a, std::size_t b) {
  if (std::min(a, b) != 3) throw StrategyError("Ka3-half robber policy needs min(a, b) = 3");
  auto sub = subdivide(complete_bipartite(a, b), 2);
  require_graph(g, sub.graph, "K_{a,b}^(1/2)");
  const auto universe = g.vertex_count();
  std::vector<VertexSet> f;
  add_pairs(f, universe, range(0, static_cast<Vertex>(a)));
  add_pairs(f, universe, range(static_cast<Vertex>(a), static_cast<Vertex>(a + b)));
  EvasionFamily fam{std::move(f), 2};
  RobberPlan plan;
  plan.family = fam;
  plan.policy = std::make_unique<FamilyAnswerPolicy>("ka3-half", g, std::move(fam));
  return plan;
}

nlohmann::json evasion_family_to_json(const EvasionFamily& f) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& s : f.members) members.push_back(vertex_set_to_json(s));
  return {{"lookahead", f.lookahead}, {"members", std::move(members)}};
}

EvasionFamily evasion_family_from_json(const nlohmann::json& j, std::size_t universe) {
  EvasionFamily f;
  f.lookahead = j.at("lookahead").get<std::uint32_t>();
  for (const auto& s : j.at("members")) f.members.push_back(vertex_set_from_json(s, universe));
  return f;
}

std::vector<std::string> robber_plan_ids() { return {"girth6", "kn-small-m", "kab", "ka3-half"}; }

RobberPlan make_robber_plan(const std::string& id, const BuiltGraph& built) {
  const auto& g = built.graph;
  if (id == "girth6") return robber_policy_girth6(g);
  const auto spec = parse_family_spec(built.spec);
  auto need = [&](const std::string& family, std::size_t count) {
    if (spec.family != family || spec.params.size() != count)
      throw StrategyError("robber plan '" + id + "' does not apply to '" + built.spec + "'");
  };
  if (id == "kn-small-m") {
    need("K", 1);
    return robber_policy_kn_small_m(g, spec.params[0], spec.m);
  }
  if (id == "kab") {
    need("Kab", 2);
    return robber_policy_kab(g, spec.params[0], spec.params[1], spec.m);
  }
  if (id == "ka3-half") {
    need("Kab", 2);
    if (spec.m != 2) throw StrategyError("ka3-half needs Kab:a,b/2");
    return robber_policy_ka3_half(g, spec.params[0], spec.params[1]);
  }
  throw StrategyError("unknown robber plan '" + id + "'");
}

}  // namespace rlg
