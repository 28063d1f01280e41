#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "edgefuse/scene.hpp"

namespace edgefuse {

// Injective map from group index to edge server id.
struct Assignment {
  std::vector<int> server_ids; // server_ids[i] serves group i

  void validate(std::size_t group_count,
                std::span<const EdgeServerSpec> servers) const;

  bool operator==(const Assignment&) const = default;
};

using GroupLatencyFn =
    std::function<double(std::span<const int> group, const EdgeServerSpec& e)>;
using GroupSizeFn = std::function<double(std::span<const int> group)>;

// Greedy resource-aware assignment: groups are visited in index order and each
// takes the remaining server minimizing edge latency plus upload time of the
// group's estimated output over that server's cloud link. Ties go to the
// lowest server id. Requires at least as many servers as groups.
Assignment assign_servers(std::span<const std::vector<int>> groups,
                          std::span<const EdgeServerSpec> servers,
                          const GroupLatencyFn& latency,
                          const GroupSizeFn& output_size);

struct OracleResult {
  Assignment assignment;
  double total_latency_s = 0.0;
};

using AssignmentCostFn = std::function<double(const Assignment&)>;

// Exhaustive minimum over all injective group->server maps under the supplied
// total-latency evaluator; ties resolved toward the lexicographically smallest
// server-id sequence. Guarded to at most 8 servers.
OracleResult oracle_optimal_assignment(std::size_t group_count,
                                       std::span<const EdgeServerSpec> servers,
                                       const AssignmentCostFn& cost);

}  // namespace edgefuse
