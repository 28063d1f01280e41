#include "edgefuse/tabu.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace edgefuse {

TabuList::TabuList(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("tabu list: capacity must be >= 1");
}

bool TabuList::contains(VertexPair p) const {
  return std::find(entries_.begin(), entries_.end(), p) != entries_.end();
}

std::optional<std::size_t> TabuList::position(VertexPair p) const {
  auto it = std::find(entries_.begin(), entries_.end(), p);
  if (it == entries_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - entries_.begin());
}

void TabuList::push(VertexPair p) {
  entries_.push_back(p);
  while (entries_.size() > capacity_) entries_.pop_front();
}

void TabuList::remove(VertexPair p) {
  auto it = std::find(entries_.begin(), entries_.end(), p);
  if (it != entries_.end()) entries_.erase(it);
}

void TabuConfig::validate() const {
  if (max_iterations < 0)
    throw std::invalid_argument("tabu config: max_iterations must be >= 0");
  if (tabu_capacity < 1)
    throw std::invalid_argument("tabu config: tabu_capacity must be >= 1");
}

Grouping tabu_optimize(const OverlapGraph& g, const Grouping& initial,
                       const TabuConfig& config) {
  config.validate();
  initial.validate(g.vertex_count());
  if (!initial.balanced())
    throw std::invalid_argument("tabu_optimize: initial grouping must be balanced");

  const int v_count = g.vertex_count();
  const int n_groups = initial.group_count;

  Grouping current = initial;
  Grouping best = initial;
  double current_f = fitness(g, current);
  double best_f = current_f;
  TabuList tabu(config.tabu_capacity);

  // group_weight[v][i]: total link weight from v into group i under the
  // current grouping. Swapping u<->v changes fitness by
  //   W[u][g(u)] - W[u][g(v)] + W[v][g(v)] - W[v][g(u)] + 2 w(u, v).
  std::vector<std::vector<double>> group_weight(
      v_count, std::vector<double>(n_groups, 0.0));

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    for (auto& row : group_weight) std::fill(row.begin(), row.end(), 0.0);
    for (int v = 0; v < v_count; ++v)
      for (const auto& [u, w] : g.adjacency(v))
        group_weight[v][current.assignment[u]] += w;

    int best_u = -1, best_v = -1;
    double best_move_f = std::numeric_limits<double>::infinity();
    bool best_move_tabu = false;
    int oldest_u = -1, oldest_v = -1;
    std::size_t oldest_pos = std::numeric_limits<std::size_t>::max();

    for (int u = 0; u < v_count; ++u) {
      const int gu = current.assignment[u];
      for (int v = u + 1; v < v_count; ++v) {
        const int gv = current.assignment[v];
        if (gu == gv) continue;
        const double delta = group_weight[u][gu] - group_weight[u][gv] +
                             group_weight[v][gv] - group_weight[v][gu] +
                             2.0 * g.weight(u, v);
        const double moved_f = current_f + delta;
        const auto pos = tabu.position({u, v});
        const bool is_tabu = pos.has_value();
        // Tabu moves are admissible only when they beat the best seen.
        if (!is_tabu || moved_f < best_f) {
          if (moved_f < best_move_f) {
            best_u = u;
            best_v = v;
            best_move_f = moved_f;
            best_move_tabu = is_tabu;
          }
        }
        if (is_tabu && *pos < oldest_pos) {
          oldest_pos = *pos;
          oldest_u = u;
          oldest_v = v;
        }
      }
    }

    if (best_u < 0) {
      // Every cross-group pair is tabu and none aspirates: take the pair
      // closest to eviction so the search keeps moving.
      if (oldest_u < 0) break; // no cross-group pair exists at all
      best_u = oldest_u;
      best_v = oldest_v;
      best_move_tabu = true;
    }

    std::swap(current.assignment[best_u], current.assignment[best_v]);
    // Exact recompute keeps rounding error out of the accept/best decisions.
    current_f = fitness(g, current);
    if (best_move_tabu) tabu.remove({best_u, best_v});
    tabu.push({best_u, best_v});
    if (current_f < best_f) {
      best_f = current_f;
      best = current;
    }
  }
  return best;
}

}  // namespace edgefuse
