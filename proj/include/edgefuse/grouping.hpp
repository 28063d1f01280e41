#pragma once

#include <span>

#include "edgefuse/overlap_graph.hpp"

namespace edgefuse {

struct GroupingOptions {
  // When true (default) the max-gain pick is drawn from the frontier buffer of
  // candidates adjacent to already-grouped vertices; when false it scans every
  // remaining candidate.
  bool frontier_pool = true;
};

// Attraction of candidate v to the group under construction minus its
// attachment to the remaining candidates. v must be in candidates.
double gain(const OverlapGraph& g, int v, std::span<const int> current_group,
            std::span<const int> candidates);

// Balanced construction: groups are filled round-robin one vertex at a time,
// each pick either the least-connected remaining candidate (empty frontier) or
// the max-gain frontier candidate; the last group takes the leftover
// candidates once at most V/group_count of them remain. Deterministic; ties go
// to the lowest vertex index. Group sizes differ by at most one.
Grouping initial_grouping(const OverlapGraph& g, int group_count,
                          const GroupingOptions& options = {});

}  // namespace edgefuse
