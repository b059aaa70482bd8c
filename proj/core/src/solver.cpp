#include "rlg/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <functional>
#include <thread>
#include <unordered_set>

namespace rlg {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::CopWins: return "CopWins";
    case Verdict::RobberWins: return "RobberWins";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "CopWins") return Verdict::CopWins;
  if (s == "RobberWins") return Verdict::RobberWins;
  if (s == "Unknown") return Verdict::Unknown;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

const PolicyMove* CopPolicy::find(const VertexSet& state) const {
  const auto it = moves_.find(state);
  return it == moves_.end() ? nullptr : &it->second;
}

std::vector<std::pair<VertexSet, PolicyMove>> CopPolicy::sorted_entries() const {
  std::vector<std::pair<VertexSet, PolicyMove>> out(moves_.begin(), moves_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return member_order_less(a.first, b.first); });
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

template <std::size_t W>
using Bits = std::array<std::uint64_t, W>;

template <std::size_t W>
std::size_t popcount(const Bits<W>& b) {
  std::size_t c = 0;
  for (auto w : b) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

template <std::size_t W>
bool is_zero(const Bits<W>& b) {
  for (auto w : b)
    if (w != 0) return false;
  return true;
}

template <std::size_t W>
Bits<W> to_bits(const VertexSet& s) {
  Bits<W> b{};
  const auto words = s.words();
  std::copy(words.begin(), words.end(), b.begin());
  return b;
}

template <std::size_t W>
VertexSet to_set(const std::uint64_t* words, std::size_t universe) {
  return VertexSet::from_words(universe, std::span<const std::uint64_t>(words, words_for(universe)));
}

/// Interned bit-set states in one contiguous arena, indexed by an
/// open-addressing hash table. A state's identity is its arena index.
template <std::size_t W>
class StateArena {
 public:
  StateArena() { slots_.assign(1024, 0); }

  std::uint32_t size() const { return static_cast<std::uint32_t>(words_.size() / W); }
  const std::uint64_t* at(std::uint32_t id) const { return words_.data() + std::size_t{id} * W; }

  std::pair<std::uint32_t, bool> intern(const Bits<W>& key) {
    if ((std::size_t{size()} + 1) * 2 > slots_.size()) grow();
    const std::size_t mask = slots_.size() - 1;
    std::size_t pos = hash_words(key) & mask;
    while (true) {
      const std::uint32_t slot = slots_[pos];
      if (slot == 0) {
        const std::uint32_t id = size();
        words_.insert(words_.end(), key.begin(), key.end());
        slots_[pos] = id + 1;
        return {id, true};
      }
      if (std::equal(key.begin(), key.end(), at(slot - 1))) return {slot - 1, false};
      pos = (pos + 1) & mask;
    }
  }

  std::optional<std::uint32_t> find(const Bits<W>& key) const {
    const std::size_t mask = slots_.size() - 1;
    std::size_t pos = hash_words(key) & mask;
    while (true) {
      const std::uint32_t slot = slots_[pos];
      if (slot == 0) return std::nullopt;
      if (std::equal(key.begin(), key.end(), at(slot - 1))) return slot - 1;
      pos = (pos + 1) & mask;
    }
  }

 private:
  void grow() {
    std::vector<std::uint32_t> next(slots_.size() * 2, 0);
    const std::size_t mask = next.size() - 1;
    for (std::uint32_t id = 0; id < size(); ++id) {
      std::size_t pos = hash_words(std::span<const std::uint64_t>(at(id), W)) & mask;
      while (next[pos] != 0) pos = (pos + 1) & mask;
      next[pos] = id + 1;
    }
    slots_ = std::move(next);
  }

  std::vector<std::uint64_t> words_;
  std::vector<std::uint32_t> slots_;
};

inline constexpr Vertex kNoProbe = std::numeric_limits<Vertex>::max();

template <std::size_t W>
class Solver {
 public:
  Solver(const Graph& g, const SolveOptions& options) : g_(g), n_(g.vertex_count()), options_(options) {
    nbhd_.reserve(n_);
    for (Vertex v = 0; v < n_; ++v) nbhd_.push_back(to_bits<W>(g.closed_neighborhood(v)));
    layer_begin_.reserve(n_ + 1);
    for (Vertex v = 0; v < n_; ++v) {
      layer_begin_.push_back(static_cast<std::uint32_t>(layers_.size()));
      for (const auto& layer : g.distance_layers(v)) layers_.push_back(to_bits<W>(layer));
    }
    layer_begin_.push_back(static_cast<std::uint32_t>(layers_.size()));
  }

  SolveResult run() {
    const auto start = Clock::now();
    SolveResult result;
    const auto finish = [&](SolveResult& r) {
      r.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
      return std::move(r);
    };

    if (n_ == 1) {
      result.verdict = Verdict::CopWins;
      result.capture_bound = 0;
      return finish(result);
    }

    const bool explored = explore(start, result);
    result.stats.states_explored = arena_.size();
    if (!explored || !fixpoint(start, result)) {
      result.verdict = Verdict::Unknown;
      return finish(result);
    }
    extract(result);
    return finish(result);
  }

 private:
  Bits<W> expand(const std::uint64_t* s) const {
    Bits<W> out{};
    for (std::size_t i = 0; i < W; ++i) {
      std::uint64_t w = s[i];
      while (w != 0) {
        const auto v = i * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
        const auto& nb = nbhd_[v];
        for (std::size_t k = 0; k < W; ++k) out[k] |= nb[k];
        w &= w - 1;
      }
    }
    return out;
  }

  /// Lowest probe splitting `e` into singletons only.
  Vertex immediate_probe(const Bits<W>& e) const {
    const std::size_t e_count = popcount(e);
    for (Vertex v = 0; v < n_; ++v) {
      const auto first = layer_begin_[v];
      const auto last = layer_begin_[v + 1];
      if (e_count > last - first) continue;
      bool all_single = true;
      for (auto d = first; d < last && all_single; ++d) {
        Bits<W> c;
        for (std::size_t k = 0; k < W; ++k) c[k] = e[k] & layers_[d][k];
        if (popcount(c) > 1) all_single = false;
      }
      if (all_single) return v;
    }
    return kNoProbe;
  }

  /// Answer classes of size >= 2 for every probe, appended to `out`.
  void successors(const Bits<W>& e, std::vector<Bits<W>>& out) const {
    for (Vertex v = 0; v < n_; ++v) {
      for (auto d = layer_begin_[v]; d < layer_begin_[v + 1]; ++d) {
        Bits<W> c;
        for (std::size_t k = 0; k < W; ++k) c[k] = e[k] & layers_[d][k];
        if (popcount(c) > 1) out.push_back(c);
      }
    }
  }

  bool out_of_time(Clock::time_point start) const {
    return std::chrono::duration<double>(Clock::now() - start).count() > options_.budget.max_seconds;
  }

  template <class F>
  void parallel_for(std::size_t count, std::size_t min_parallel, F&& work) const {
    const unsigned threads = std::max(1U, options_.threads);
    if (threads == 1 || count < min_parallel) {
      work(std::size_t{0}, count);
      return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = std::min(count, t * chunk);
      const std::size_t hi = std::min(count, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Breadth-first over the arena. Successor classes of a block are computed
  // (possibly concurrently) without touching the arena, then interned in
  // block order, so state numbering never depends on the thread count.
  bool explore(Clock::time_point start, SolveResult& result) {
    arena_.intern(to_bits<W>(g_.all_vertices()));

    constexpr std::size_t kBlock = 1024;
    std::vector<Vertex> block_immediate(kBlock);
    std::vector<std::vector<Bits<W>>> block_classes(kBlock);

    for (std::uint32_t next = 0; next < arena_.size();) {
      const std::uint32_t end = std::min<std::uint32_t>(arena_.size(), next + kBlock);
      const std::size_t count = end - next;

      parallel_for(count, 64, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          const auto e = expand(arena_.at(next + static_cast<std::uint32_t>(i)));
          block_classes[i].clear();
          block_immediate[i] = immediate_probe(e);
          if (block_immediate[i] == kNoProbe || options_.explore_all) successors(e, block_classes[i]);
        }
      });

      for (std::size_t i = 0; i < count; ++i) {
        immediate_.push_back(block_immediate[i]);
        result.stats.transitions += block_classes[i].size();
        for (const auto& c : block_classes[i]) arena_.intern(c);
      }
      next = end;

      if (arena_.size() > options_.budget.max_states) {
        result.budget_note = "state budget exhausted (" + std::to_string(options_.budget.max_states) + " states)";
        return false;
      }
      if (out_of_time(start)) {
        result.budget_note = "time budget exhausted during exploration";
        return false;
      }
    }
    return true;
  }

  bool fixpoint(Clock::time_point start, SolveResult& result) {
    const std::uint32_t total = arena_.size();
    rank_.assign(total, kNoRank);
    std::vector<std::uint32_t> unresolved;
    for (std::uint32_t id = 0; id < total; ++id) {
      if (immediate_[id] != kNoProbe)
        rank_[id] = 1;
      else
        unresolved.push_back(id);
    }
    result.stats.fixpoint_iterations = 1;

    const std::size_t max_rank = options_.budget.max_rank == 0 ? total : options_.budget.max_rank;
    std::vector<std::uint8_t> resolves;

    for (std::uint32_t k = 2; !unresolved.empty(); ++k) {
      if (k > max_rank) {
        result.budget_note = "rank budget exhausted";
        return false;
      }
      resolves.assign(unresolved.size(), 0);
      // Reads only ranks fixed in earlier rounds, so the outcome does not
      // depend on scheduling.
      parallel_for(unresolved.size(), 1024, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          resolves[i] = winning_probe(unresolved[i], k - 1) != kNoProbe ? 1 : 0;
      });

      std::vector<std::uint32_t> still;
      bool changed = false;
      for (std::size_t i = 0; i < unresolved.size(); ++i) {
        if (resolves[i] != 0) {
          rank_[unresolved[i]] = k;
          changed = true;
        } else {
          still.push_back(unresolved[i]);
        }
      }
      if (!changed) break;
      ++result.stats.fixpoint_iterations;
      unresolved = std::move(still);
      if (out_of_time(start)) {
        result.budget_note = "time budget exhausted during fixpoint";
        return false;
      }
    }
    return true;
  }

  /// Lowest probe all of whose answer classes have rank <= limit.
  Vertex winning_probe(std::uint32_t state, std::uint32_t limit) const {
    const auto e = expand(arena_.at(state));
    for (Vertex v = 0; v < n_; ++v) {
      bool ok = true;
      for (auto d = layer_begin_[v]; d < layer_begin_[v + 1] && ok; ++d) {
        Bits<W> c;
        for (std::size_t k = 0; k < W; ++k) c[k] = e[k] & layers_[d][k];
        if (popcount(c) > 1) {
          const auto id = arena_.find(c);
          ok = id.has_value() && rank_[*id] <= limit;
        }
      }
      if (ok) return v;
    }
    return kNoProbe;
  }

  void extract(SolveResult& result) const {
    for (std::uint32_t id = 0; id < arena_.size(); ++id) {
      const auto r = rank_[id];
      if (r == kNoRank) {
        result.certificate.push_back(to_set<W>(arena_.at(id), n_));
        continue;
      }
      const Vertex probe = r == 1 ? immediate_[id] : winning_probe(id, r - 1);
      result.policy.set(to_set<W>(arena_.at(id), n_), PolicyMove{probe, r});
    }
    std::sort(result.certificate.begin(), result.certificate.end(), member_order_less);
    if (options_.explore_all) result.losing_states = result.certificate;
    if (rank_[0] != kNoRank) {
      result.verdict = Verdict::CopWins;
      result.capture_bound = rank_[0];
      result.certificate.clear();
    } else {
      result.verdict = Verdict::RobberWins;
    }
  }

  const Graph& g_;
  std::size_t n_;
  SolveOptions options_;
  std::vector<Bits<W>> nbhd_;
  std::vector<Bits<W>> layers_;
  std::vector<std::uint32_t> layer_begin_;

  StateArena<W> arena_;
  std::vector<Vertex> immediate_;
  std::vector<std::uint32_t> rank_;
};

template <std::size_t W>
SolveResult run_solver(const Graph& g, const SolveOptions& options) {
  return Solver<W>(g, options).run();
}

}  // namespace

SolveResult solve(const Graph& g, const SolveOptions& options) {
  const auto words = words_for(g.vertex_count());
  if (words <= 1) return run_solver<1>(g, options);
  if (words <= 2) return run_solver<2>(g, options);
  if (words <= 4) return run_solver<4>(g, options);
  if (words <= 8) return run_solver<8>(g, options);
  SolveResult r;
  r.verdict = Verdict::Unknown;
  r.budget_note = "graphs above 512 vertices are outside the solver's state width";
  return r;
}

nlohmann::json solve_result_to_json(const Graph& g, const SolveResult& r, bool include_states) {
  nlohmann::json j;
  j["vertex_count"] = g.vertex_count();
  j["verdict"] = std::string(to_string(r.verdict));
  j["capture_bound"] = r.verdict == Verdict::CopWins ? nlohmann::json(r.capture_bound) : nlohmann::json(nullptr);
  j["stats"] = {{"states_explored", r.stats.states_explored},
                {"transitions", r.stats.transitions},
                {"fixpoint_iterations", r.stats.fixpoint_iterations},
                {"wall_seconds", r.stats.wall_seconds}};
  if (!r.budget_note.empty()) j["budget_note"] = r.budget_note;
  if (include_states) {
    nlohmann::json policy = nlohmann::json::array();
    for (const auto& [state, move] : r.policy.sorted_entries())
      policy.push_back({{"state", vertex_set_to_json(state)}, {"probe", move.probe}, {"rank", move.rank}});
    j["policy"] = std::move(policy);
    nlohmann::json cert = nlohmann::json::array();
    for (const auto& s : r.certificate) cert.push_back(vertex_set_to_json(s));
    j["certificate"] = std::move(cert);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

constexpr std::uint32_t kInProgress = std::numeric_limits<std::uint32_t>::max() - 1;
constexpr std::uint32_t kFailed = std::numeric_limits<std::uint32_t>::max();

struct PolicyWalker {
  const Graph& g;
  const CopPolicy& policy;
  std::uint32_t bound;
  std::unordered_map<VertexSet, std::uint32_t, VertexSetHash> memo;
  std::vector<std::pair<Vertex, Distance>> path;
  std::vector<std::pair<Vertex, Distance>> failure_path;
  std::string error;

  // Worst-case probes from s, or kFailed.
  std::uint32_t depth(const VertexSet& s, std::uint32_t used) {
    if (s.is_singleton()) return 0;
    if (const auto it = memo.find(s); it != memo.end()) {
      if (it->second == kInProgress) return fail("the policy can be forced into a cycle");
      if (used + it->second > bound) return fail("bound exceeded");
      return it->second;
    }
    if (used >= bound) return fail("bound exceeded");
    const auto* move = policy.find(s);
    if (move == nullptr) return fail("policy undefined at state " + s.to_string());
    memo[s] = kInProgress;
    const auto part = probe_partition(g, expand(g, s), move->probe);
    std::uint32_t worst = 0;
    for (const auto& c : part.classes) {
      path.emplace_back(move->probe, c.distance);
      const auto d = depth(c.members, used + 1);
      if (d == kFailed) return kFailed;
      path.pop_back();
      worst = std::max(worst, d + 1);
    }
    memo[s] = worst;
    return worst;
  }

  std::uint32_t fail(std::string why) {
    error = std::move(why);
    failure_path = path;
    return kFailed;
  }

  // Follows the deepest branch from the full set.
  std::vector<std::pair<Vertex, Distance>> worst_branch(VertexSet s) const {
    std::vector<std::pair<Vertex, Distance>> out;
    while (!s.is_singleton()) {
      const auto* move = policy.find(s);
      const auto part = probe_partition(g, expand(g, s), move->probe);
      const ProbeClass* pick = nullptr;
      std::uint32_t best = 0;
      for (const auto& c : part.classes) {
        const std::uint32_t d = c.members.is_singleton() ? 0 : memo.at(c.members);
        if (pick == nullptr || d > best) {
          pick = &c;
          best = d;
        }
      }
      out.emplace_back(move->probe, pick->distance);
      s = pick->members;
    }
    return out;
  }
};

}  // namespace

PolicyCheck verify_policy(const Graph& g, const CopPolicy& policy, std::uint32_t bound) {
  PolicyWalker walker{g, policy, bound, {}, {}, {}, {}};
  PolicyCheck out;
  const auto d = walker.depth(g.all_vertices(), 0);
  if (d == kFailed) {
    out.ok = false;
    out.error = walker.error;
    out.transcript = walker.failure_path;
    return out;
  }
  out.ok = true;
  out.worst_case = d;
  out.transcript = walker.worst_branch(g.all_vertices());
  return out;
}

bool verify_certificate(const Graph& g, const std::vector<VertexSet>& family) {
  if (family.empty()) return false;
  std::unordered_set<VertexSet, VertexSetHash> members;
  for (const auto& s : family) {
    if (s.universe() != g.vertex_count() || s.count() < 2) return false;
    members.insert(s);
  }
  const auto closed_step = [&](const VertexSet& s, Vertex v) {
    const auto part = probe_partition(g, expand(g, s), v);
    return std::any_of(part.classes.begin(), part.classes.end(), [&](const ProbeClass& c) {
      return c.members.count() >= 2 && members.contains(c.members);
    });
  };

  const auto all = g.all_vertices();
  if (!members.contains(all)) {
    for (Vertex v = 0; v < g.vertex_count(); ++v)
      if (!closed_step(all, v)) return false;
  }
  for (const auto& s : members)
    for (Vertex v = 0; v < g.vertex_count(); ++v)
      if (!closed_step(s, v)) return false;
  return true;
}

Distance adversarial_answer(const ProbePartition& partition, const SolveResult* known) {
  const ProbeClass* best = nullptr;
  bool best_outside = false;
  for (const auto& c : partition.classes) {
    const bool outside = known != nullptr ? !known->cop_winning(c.members) : !c.members.is_singleton();
    if (best == nullptr) {
      best = &c;
      best_outside = outside;
      continue;
    }
    if (outside != best_outside) {
      if (outside) {
        best = &c;
        best_outside = true;
      }
      continue;
    }
    const auto sz = c.members.count();
    const auto best_sz = best->members.count();
    if (sz > best_sz || (sz == best_sz && c.members.first() < best->members.first())) best = &c;
  }
  if (best == nullptr) throw GameError("empty probe partition");
  return best->distance;
}

// ---------------------------------------------------------------------------
// Grids

std::string grid_cell_spec(const std::string& family, const std::map<std::string, int>& params) {
  const auto get = [&](const std::string& k) {
    const auto it = params.find(k);
    if (it == params.end()) throw std::invalid_argument("grid family '" + family + "' needs parameter '" + k + "'");
    return std::to_string(it->second);
  };
  if (family == "kn") return "K:" + get("n") + "/" + get("m");
  if (family == "kab") return "Kab:" + get("a") + "," + get("b") + "/" + get("m");
  if (family == "cycle") return "C:" + get("n");
  throw std::invalid_argument("unknown grid family '" + family + "'");
}

GridResult locatability_grid(const std::string& family, const std::vector<ParamRange>& ranges,
                             const SolveOptions& options) {
  GridResult out;
  out.family = family;
  for (const auto& r : ranges) out.param_names.push_back(r.name);
  std::vector<int> current(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].first > ranges[i].last) throw std::invalid_argument("empty range for '" + ranges[i].name + "'");
    current[i] = ranges[i].first;
  }
  while (true) {
    GridCell cell;
    for (std::size_t i = 0; i < ranges.size(); ++i) cell.params[ranges[i].name] = current[i];
    try {
      cell.spec = grid_cell_spec(family, cell.params);
      const auto built = build_named(cell.spec);
      const auto r = solve(built.graph, options);
      cell.verdict = r.verdict;
      if (r.verdict == Verdict::CopWins) cell.bound = r.capture_bound;
      cell.stats = r.stats;
      cell.note = r.budget_note;
    } catch (const GraphError& e) {
      cell.verdict = Verdict::Unknown;
      cell.note = e.what();
    }
    out.cells.push_back(std::move(cell));

    std::size_t i = ranges.size();
    while (i > 0) {
      --i;
      if (current[i] < ranges[i].last) {
        ++current[i];
        break;
      }
      current[i] = ranges[i].first;
      if (i == 0) return out;
    }
    if (ranges.empty()) return out;
  }
}

nlohmann::json GridResult::to_json() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cell = {{"params", c.params},
                           {"spec", c.spec},
                           {"verdict", std::string(to_string(c.verdict))},
                           {"bound", c.bound ? nlohmann::json(*c.bound) : nlohmann::json(nullptr)},
                           {"states", c.stats.states_explored},
                           {"seconds", c.stats.wall_seconds}};
    if (!c.note.empty()) cell["note"] = c.note;
    cells_json.push_back(std::move(cell));
  }
  return {{"family", family}, {"cells", std::move(cells_json)}};
}

std::string GridResult::to_text() const {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = param_names;
  header.insert(header.end(), {"verdict", "bound", "states", "seconds"});
  rows.push_back(header);
  for (const auto& c : cells) {
    std::vector<std::string> row;
    for (const auto& k : param_names) row.push_back(std::to_string(c.params.at(k)));
    row.emplace_back(to_string(c.verdict));
    row.push_back(c.bound ? std::to_string(*c.bound) : "-");
    row.push_back(std::to_string(c.stats.states_explored));
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", c.stats.wall_seconds);
    row.emplace_back(secs);
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::string out = "family " + family + "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out += r[i];
      if (i + 1 < r.size()) out += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace rlg
