#include "edgefuse/grouping.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <vector>

namespace edgefuse {

double gain(const OverlapGraph& g, int v, std::span<const int> current_group,
            std::span<const int> candidates) {
  if (v < 0 || v >= g.vertex_count())
    throw std::invalid_argument("gain: vertex out of range");
  std::vector<char> in_group(g.vertex_count(), 0);
  std::vector<char> in_cand(g.vertex_count(), 0);
  for (int u : current_group) in_group.at(u) = 1;
  for (int u : candidates) in_cand.at(u) = 1;
  if (!in_cand[v]) throw std::invalid_argument("gain: vertex is not a candidate");

  double to_group = 0.0, to_candidates = 0.0;
  for (const auto& [u, w] : g.adjacency(v)) {
    if (in_group[u]) to_group += w;
    if (in_cand[u] && u != v) to_candidates += w;
  }
  return to_group - to_candidates;
}

namespace {

// Lazy min-heap entries keyed by (candidate-degree, vertex); stale entries are
// skipped on pop.
using DegEntry = std::pair<int, int>;

struct SortedBuffer {
  std::vector<int> items; // ascending
  std::vector<char> member;

  explicit SortedBuffer(int v) : member(v, 0) {}

  void insert(int v) {
    if (member[v]) return;
    member[v] = 1;
    items.insert(std::lower_bound(items.begin(), items.end(), v), v);
  }
  void erase(int v) {
    if (!member[v]) return;
    member[v] = 0;
    items.erase(std::lower_bound(items.begin(), items.end(), v));
  }
  bool empty() const { return items.empty(); }
};

}  // namespace

Grouping initial_grouping(const OverlapGraph& g, int group_count,
                          const GroupingOptions& options) {
  const int v_count = g.vertex_count();
  if (group_count < 1 || group_count > v_count)
    throw std::invalid_argument("initial_grouping: group_count must be in [1, V]");

  Grouping result;
  result.group_count = group_count;
  result.assignment.assign(v_count, group_count - 1);
  if (group_count == 1) return result;

  std::vector<char> in_cand(v_count, 1);
  int cand_size = v_count;
  // Per-candidate bookkeeping, maintained as vertices leave the pool:
  // deg_in_cand  links into the remaining pool,
  // cand_sum     total weight into the remaining pool,
  // group_sum    total weight into each group built so far.
  std::vector<int> deg_in_cand(v_count);
  std::vector<double> cand_sum(v_count, 0.0);
  std::vector<std::vector<double>> group_sum(
      v_count, std::vector<double>(group_count - 1, 0.0));

  std::priority_queue<DegEntry, std::vector<DegEntry>, std::greater<>> by_degree;
  for (int v = 0; v < v_count; ++v) {
    deg_in_cand[v] = g.degree(v);
    for (const auto& [u, w] : g.adjacency(v)) cand_sum[v] += w;
    by_degree.emplace(deg_in_cand[v], v);
  }

  SortedBuffer frontier(v_count);
  const double tail_quota = static_cast<double>(v_count) / group_count;

  auto pick_least_connected = [&]() {
    while (true) {
      auto [deg, v] = by_degree.top();
      by_degree.pop();
      if (in_cand[v] && deg == deg_in_cand[v]) return v;
    }
  };
  auto pick_max_gain = [&](std::span<const int> pool, int group) {
    int best = -1;
    double best_gain = 0.0;
    for (int v : pool) {
      if (!in_cand[v]) continue;
      const double gv = group_sum[v][group] - cand_sum[v];
      if (best < 0 || gv > best_gain) {
        best = v;
        best_gain = gv;
      }
    }
    return best;
  };

  std::vector<int> all_vertices;
  if (!options.frontier_pool) {
    all_vertices.resize(v_count);
    for (int v = 0; v < v_count; ++v) all_vertices[v] = v;
  }

  bool done = cand_size <= tail_quota;
  while (!done) {
    for (int group = 0; group < group_count - 1; ++group) {
      int v;
      if (frontier.empty()) {
        v = pick_least_connected();
      } else if (options.frontier_pool) {
        v = pick_max_gain(frontier.items, group);
      } else {
        v = pick_max_gain(all_vertices, group);
      }

      result.assignment[v] = group;
      in_cand[v] = 0;
      --cand_size;
      frontier.erase(v);
      for (const auto& [u, w] : g.adjacency(v)) {
        if (!in_cand[u]) continue;
        --deg_in_cand[u];
        by_degree.emplace(deg_in_cand[u], u);
        cand_sum[u] -= w;
        group_sum[u][group] += w;
        frontier.insert(u);
      }

      if (cand_size <= tail_quota) {
        done = true;
        break;
      }
    }
  }
  // Remaining candidates form the last group (preset in assignment).
  return result;
}

}  // namespace edgefuse
