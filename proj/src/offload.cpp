#include "edgefuse/offload.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace edgefuse {

void Assignment::validate(std::size_t group_count,
                          std::span<const EdgeServerSpec> servers) const {
  if (server_ids.size() != group_count)
    throw std::invalid_argument("assignment: expected one server per group");
  std::unordered_set<int> known;
  for (const auto& e : servers) known.insert(e.id);
  std::unordered_set<int> used;
  for (int id : server_ids) {
    if (!known.count(id))
      throw std::invalid_argument("assignment: unknown server id " + std::to_string(id));
    if (!used.insert(id).second)
      throw std::invalid_argument("assignment: server id " + std::to_string(id) +
                                  " used twice");
  }
}

Assignment assign_servers(std::span<const std::vector<int>> groups,
                          std::span<const EdgeServerSpec> servers,
                          const GroupLatencyFn& latency,
                          const GroupSizeFn& output_size) {
  if (groups.empty())
    throw std::invalid_argument("server assignment: needs at least one group");
  if (groups.size() > servers.size())
    throw std::invalid_argument("server assignment: more groups than servers");

  std::vector<char> taken(servers.size(), 0);
  Assignment out;
  out.server_ids.reserve(groups.size());
  for (const auto& group : groups) {
    if (group.empty())
      throw std::invalid_argument("server assignment: empty group");
    const double bytes = output_size(group);
    int best_index = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < servers.size(); ++s) {
      if (taken[s]) continue;
      const double cost = latency(group, servers[s]) + bytes / servers[s].uplink_bw_cloud;
      if (cost < best_cost ||
          (cost == best_cost && servers[s].id < servers[best_index].id)) {
        best_cost = cost;
        best_index = static_cast<int>(s);
      }
    }
    taken[best_index] = 1;
    out.server_ids.push_back(servers[best_index].id);
  }
  return out;
}

OracleResult oracle_optimal_assignment(std::size_t group_count,
                                       std::span<const EdgeServerSpec> servers,
                                       const AssignmentCostFn& cost) {
  if (group_count < 1)
    throw std::invalid_argument("assignment oracle: needs at least one group");
  if (group_count > servers.size())
    throw std::invalid_argument("assignment oracle: more groups than servers");
  if (servers.size() > 8)
    throw std::invalid_argument("assignment oracle: limited to 8 servers");

  // Server ids in ascending order so candidate sequences enumerate in
  // lexicographic order and the first strict minimum wins ties.
  std::vector<int> ids;
  ids.reserve(servers.size());
  for (const auto& e : servers) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());

  OracleResult best;
  best.total_latency_s = std::numeric_limits<double>::infinity();
  Assignment trial;
  trial.server_ids.resize(group_count);
  std::vector<char> used(ids.size(), 0);

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == group_count) {
      const double c = cost(trial);
      if (c < best.total_latency_s) {
        best.total_latency_s = c;
        best.assignment = trial;
      }
      return;
    }
    for (std::size_t s = 0; s < ids.size(); ++s) {
      if (used[s]) continue;
      used[s] = 1;
      trial.server_ids[depth] = ids[s];
      self(self, depth + 1);
      used[s] = 0;
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace edgefuse
