#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>

#include "edgefuse/overlap_graph.hpp"

namespace edgefuse {

using VertexPair = std::pair<int, int>; // normalized: first < second

// FIFO list of recently swapped vertex pairs, bounded at capacity.
class TabuList {
 public:
  explicit TabuList(std::size_t capacity);

  bool contains(VertexPair p) const;
  // Position from the oldest entry (0 = evicted next), if present.
  std::optional<std::size_t> position(VertexPair p) const;
  // Appends p and evicts oldest entries beyond capacity. Callers keep entries
  // unique by removing an existing occurrence first.
  void push(VertexPair p);
  void remove(VertexPair p);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::deque<VertexPair> entries_;
  std::size_t capacity_;
};

struct TabuConfig {
  int max_iterations = 100;
  std::size_t tabu_capacity = 10;
  std::uint64_t rng_seed = 0; // reserved for randomized restarts

  void validate() const;
};

// Swap-neighborhood refinement of a balanced grouping: each iteration applies
// the best admissible cross-group swap (tabu pairs admitted only when they
// beat the best fitness seen), accepting worse moves to escape local minima.
// Returns the best grouping visited. Group sizes are preserved.
Grouping tabu_optimize(const OverlapGraph& g, const Grouping& initial,
                       const TabuConfig& config = {});

}  // namespace edgefuse
