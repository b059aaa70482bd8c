#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rlg {

using Vertex = std::uint32_t;
using Distance = std::uint32_t;

inline constexpr std::size_t kWordBits = 64;

inline constexpr std::size_t words_for(std::size_t universe) {
  return (universe + kWordBits - 1) / kWordBits;
}

/// Dense bit-set over the vertices 0..universe-1 of one graph.
///
/// Bit v lives in word v / 64 at position v % 64 (little-endian by vertex
/// index), so word contents and hashes are identical on every platform.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe)
      : universe_(universe), words_(words_for(universe), 0) {}
  VertexSet(std::size_t universe, std::initializer_list<Vertex> members);
  VertexSet(std::size_t universe, std::span<const Vertex> members);

  static VertexSet full(std::size_t universe);
  static VertexSet from_words(std::size_t universe,
                              std::span<const std::uint64_t> words);

  std::size_t universe() const { return universe_; }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }

  bool contains(Vertex v) const {
    return v < universe_ && ((words_[v / kWordBits] >> (v % kWordBits)) & 1U);
  }
  void insert(Vertex v) { words_[v / kWordBits] |= std::uint64_t{1} << (v % kWordBits); }
  void erase(Vertex v) { words_[v / kWordBits] &= ~(std::uint64_t{1} << (v % kWordBits)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }
  bool is_singleton() const { return count() == 1; }

  /// Smallest member; the set must be nonempty.
  Vertex first() const;

  std::vector<Vertex> to_vector() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w != 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(w));
        f(static_cast<Vertex>(i * kWordBits + bit));
        w &= w - 1;
      }
    }
  }

  VertexSet& operator|=(const VertexSet& other);
  VertexSet& operator&=(const VertexSet& other);
  /// Set difference.
  VertexSet& operator-=(const VertexSet& other);

  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

  bool is_subset_of(const VertexSet& other) const;
  bool intersects(const VertexSet& other) const;

  std::uint64_t hash() const;

  /// Sorted member list rendered as "{a,b,c}" with vertex indices.
  std::string to_string() const;

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Orders sets by their sorted member lists (lexicographic), which is the
/// order used for every exported state list.
bool member_order_less(const VertexSet& a, const VertexSet& b);

struct VertexSetHash {
  std::size_t operator()(const VertexSet& s) const { return static_cast<std::size_t>(s.hash()); }
};

std::uint64_t hash_words(std::span<const std::uint64_t> words);

}  // namespace rlg
