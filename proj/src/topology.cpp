#include "ringform/topology.hpp"

#include <stdexcept>
#include <string>

#include "ringform/errors.hpp"

namespace ringform {

RingGraph::RingGraph(std::size_t n, bool directed) : n_(n), directed_(directed) {
  if (n < 2) throw ConfigError("ring graph needs at least 2 agents, got " + std::to_string(n));
}

Neighbors RingGraph::neighbors(std::size_t i) const {
  if (i >= n_) {
    throw std::out_of_range("agent index " + std::to_string(i) + " outside ring of size " +
                            std::to_string(n_));
  }
  if (directed_) return Neighbors(next(i));
  return Neighbors(prev(i), next(i));
}

}  // namespace ringform
