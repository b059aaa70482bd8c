#pragma once

// Reference implementations for tests. They use plain std containers and
// their own BFS; nothing here shares code with the library beyond reading
// the edge list of a Graph.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rlg/graph.hpp"

namespace oracle {

using State = std::set<int>;

struct Adj {
  int n = 0;
  std::vector<std::vector<int>> nb;
  std::vector<std::vector<int>> dist;
};

Adj from_edges(int n, const std::vector<std::pair<int, int>>& edges);
Adj from_graph(const rlg::Graph& g);

/// All-pairs distances by Floyd-Warshall (-1 when unreachable).
std::vector<std::vector<int>> floyd(int n, const std::vector<std::pair<int, int>>& edges);

State expand(const Adj& a, const State& s);
std::map<int, State> partition(const Adj& a, const State& expanded, int probe);

/// Every post-answer state reachable from V with at least two members.
std::set<State> reachable(const Adj& a);

/// Naive minimax over the raw game tree: can the cop force a singleton
/// within `depth` probes from state s? Memoized on (state, depth) only.
class Minimax {
 public:
  explicit Minimax(const Adj& a) : a_(a) {}
  bool wins(const State& s, int depth);
  /// Least depth that wins, or -1 when `max_depth` does not.
  int rank(const State& s, int max_depth);

 private:
  const Adj& a_;
  std::map<std::pair<State, int>, bool> memo_;
};

/// Verdict of the full game: search depth = number of reachable states.
bool cop_wins(const Adj& a);

/// Shortest cycle length by BFS from every vertex (0 for forests).
int girth(const Adj& a);

/// Label-free isomorphism by brute force over permutations (n <= 9).
bool isomorphic(const rlg::Graph& g, const rlg::Graph& h);

/// Random connected graph: a random spanning tree plus extra edges.
std::pair<int, std::vector<std::pair<int, int>>> random_connected(std::mt19937& rng, int n, double extra_p);

std::string edges_spec(const std::vector<std::pair<int, int>>& edges);

}  // namespace oracle
