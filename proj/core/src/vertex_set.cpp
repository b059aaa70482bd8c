#include "rlg/vertex_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace rlg {

VertexSet::VertexSet(std::size_t universe, std::initializer_list<Vertex> members)
    : VertexSet(universe) {
  for (auto v : members) {
    if (v >= universe) throw std::out_of_range("vertex index outside the set universe");
    insert(v);
  }
}

VertexSet::VertexSet(std::size_t universe, std::span<const Vertex> members)
    : VertexSet(universe) {
  for (auto v : members) {
    if (v >= universe) throw std::out_of_range("vertex index outside the set universe");
    insert(v);
  }
}

VertexSet VertexSet::full(std::size_t universe) {
  VertexSet s(universe);
  for (std::size_t i = 0; i < s.words_.size(); ++i) s.words_[i] = ~std::uint64_t{0};
  if (const auto tail = universe % kWordBits; tail != 0)
    s.words_.back() = (std::uint64_t{1} << tail) - 1;
  return s;
}

VertexSet VertexSet::from_words(std::size_t universe, std::span<const std::uint64_t> words) {
  VertexSet s(universe);
  if (words.size() != s.words_.size()) throw std::invalid_argument("word count does not match universe");
  std::copy(words.begin(), words.end(), s.words_.begin());
  return s;
}

Vertex VertexSet::first() const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] != 0)
      return static_cast<Vertex>(i * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[i])));
  throw std::logic_error("first() on an empty vertex set");
}

std::vector<Vertex> VertexSet::to_vector() const {
  std::vector<Vertex> out;
  out.reserve(count());
  for_each([&](Vertex v) { out.push_back(v); });
  return out;
}

VertexSet& VertexSet::operator|=(const VertexSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

VertexSet& VertexSet::operator-=(const VertexSet& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  return true;
}

bool VertexSet::intersects(const VertexSet& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & other.words_[i]) != 0) return true;
  return false;
}

std::uint64_t hash_words(std::span<const std::uint64_t> words) {
  // splitmix64 finalizer folded over the words
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ words.size();
  for (auto w : words) {
    std::uint64_t z = h + w + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h = z ^ (z >> 31);
  }
  return h;
}

std::uint64_t VertexSet::hash() const { return hash_words(words_); }

std::string VertexSet::to_string() const {
  std::string out = "{";
  bool first_member = true;
  for_each([&](Vertex v) {
    if (!first_member) out += ',';
    out += std::to_string(v);
    first_member = false;
  });
  out += '}';
  return out;
}

bool member_order_less(const VertexSet& a, const VertexSet& b) {
  const auto va = a.to_vector();
  const auto vb = b.to_vector();
  return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
}

}  // namespace rlg
