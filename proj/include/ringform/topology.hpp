#pragma once

#include <array>
#include <cstddef>

namespace ringform {

/// Neighbor multiset of one agent; at most two entries. For n = 2 on an
/// undirected ring both entries are the other agent.
class Neighbors {
 public:
  Neighbors(std::size_t a, std::size_t b) : idx_{a, b}, count_(2) {}
  explicit Neighbors(std::size_t a) : idx_{a, a}, count_(1) {}

  std::size_t size() const { return count_; }
  std::size_t operator[](std::size_t k) const { return idx_[k]; }
  const std::size_t* begin() const { return idx_.data(); }
  const std::size_t* end() const { return idx_.data() + count_; }

 private:
  std::array<std::size_t, 2> idx_;
  std::size_t count_;
};

/// Ring interconnection over agents 0..n-1 with wraparound. Undirected:
/// N(i) = {i-1, i+1}; directed: N(i) = {i+1}.
class RingGraph {
 public:
  RingGraph(std::size_t n, bool directed);

  std::size_t size() const { return n_; }
  bool directed() const { return directed_; }

  std::size_t next(std::size_t i) const { return (i + 1) % n_; }
  std::size_t prev(std::size_t i) const { return (i + n_ - 1) % n_; }

  /// Throws std::out_of_range for i >= n.
  Neighbors neighbors(std::size_t i) const;

 private:
  std::size_t n_;
  bool directed_;
};

}  // namespace ringform
