#include "edgefuse/overlap_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgefuse {

OverlapGraph OverlapGraph::from_matrix(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols())
    throw std::invalid_argument("overlap graph: weight matrix must be square");
  const Eigen::Index v = weights.rows();
  if (v < 1) throw std::invalid_argument("overlap graph: needs at least one vertex");

  OverlapGraph g;
  g.vertex_count_ = static_cast<int>(v);
  g.adjacency_.resize(v);
  for (Eigen::Index i = 0; i < v; ++i) {
    if (weights(i, i) != 0.0)
      throw std::invalid_argument("overlap graph: diagonal must be zero");
    for (Eigen::Index j = i + 1; j < v; ++j) {
      const double w = weights(i, j);
      if (!std::isfinite(w) || w < 0.0 || w > 0.5)
        throw std::invalid_argument("overlap graph: weights must lie in [0, 0.5]");
      if (w != weights(j, i))
        throw std::invalid_argument("overlap graph: weight matrix must be symmetric");
      if (w > 0.0) {
        g.adjacency_[i].emplace_back(static_cast<int>(j), w);
        g.adjacency_[j].emplace_back(static_cast<int>(i), w);
        g.total_weight_ += w;
        ++g.link_count_;
      }
    }
  }
  return g;
}

OverlapGraph OverlapGraph::from_links(
    int vertex_count, std::span<const std::tuple<int, int, double>> links) {
  if (vertex_count < 1)
    throw std::invalid_argument("overlap graph: needs at least one vertex");
  OverlapGraph g;
  g.vertex_count_ = vertex_count;
  g.adjacency_.resize(vertex_count);
  for (const auto& [u, v, w] : links) {
    if (u < 0 || u >= vertex_count || v < 0 || v >= vertex_count || u == v)
      throw std::invalid_argument("overlap graph: bad link endpoints");
    if (!std::isfinite(w) || w < 0.0 || w > 0.5)
      throw std::invalid_argument("overlap graph: weights must lie in [0, 0.5]");
    if (w == 0.0) continue;
    g.adjacency_[u].emplace_back(v, w);
    g.adjacency_[v].emplace_back(u, w);
    g.total_weight_ += w;
    ++g.link_count_;
  }
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    for (std::size_t i = 1; i < adj.size(); ++i)
      if (adj[i].first == adj[i - 1].first)
        throw std::invalid_argument("overlap graph: duplicate link");
  }
  return g;
}

double OverlapGraph::weight(int u, int v) const {
  if (u < 0 || u >= vertex_count_ || v < 0 || v >= vertex_count_)
    throw std::invalid_argument("overlap graph: vertex out of range");
  if (u == v) return 0.0;
  const auto& adj = adjacency_[u];
  auto it = std::lower_bound(adj.begin(), adj.end(), v,
                             [](const auto& a, int b) { return a.first < b; });
  return (it != adj.end() && it->first == v) ? it->second : 0.0;
}

const std::vector<std::pair<int, double>>& OverlapGraph::adjacency(int v) const {
  if (v < 0 || v >= vertex_count_)
    throw std::invalid_argument("overlap graph: vertex out of range");
  return adjacency_[v];
}

int OverlapGraph::degree(int v) const {
  return static_cast<int>(adjacency(v).size());
}

std::vector<std::vector<int>> Grouping::groups() const {
  std::vector<std::vector<int>> out(group_count);
  for (std::size_t v = 0; v < assignment.size(); ++v)
    out[assignment[v]].push_back(static_cast<int>(v));
  return out;
}

std::vector<int> Grouping::group_sizes() const {
  std::vector<int> sizes(group_count, 0);
  for (int g : assignment) ++sizes[g];
  return sizes;
}

bool Grouping::balanced() const {
  const auto sizes = group_sizes();
  if (sizes.empty()) return true;
  auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  return *hi - *lo <= 1;
}

void Grouping::validate(int vertex_count) const {
  if (group_count < 1)
    throw std::invalid_argument("grouping: group_count must be >= 1");
  if (static_cast<int>(assignment.size()) != vertex_count)
    throw std::invalid_argument("grouping: expected one group per vertex, got " +
                                std::to_string(assignment.size()) + " for " +
                                std::to_string(vertex_count) + " vertices");
  for (int g : assignment)
    if (g < 0 || g >= group_count)
      throw std::invalid_argument("grouping: group index out of range");
}

std::vector<int> neighbors(const OverlapGraph& g, int v) {
  std::vector<int> out;
  out.reserve(g.adjacency(v).size());
  for (const auto& [u, w] : g.adjacency(v)) out.push_back(u);
  return out;
}

double fitness(const OverlapGraph& g, const Grouping& p) {
  p.validate(g.vertex_count());
  double cross = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v)
    for (const auto& [u, w] : g.adjacency(v))
      if (u > v && p.assignment[u] != p.assignment[v]) cross += w;
  return cross;
}

double in_group_weight(const OverlapGraph& g, const Grouping& p, int i) {
  p.validate(g.vertex_count());
  if (i < 0 || i >= p.group_count)
    throw std::invalid_argument("in_group_weight: group index out of range");
  double total = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (p.assignment[v] != i) continue;
    for (const auto& [u, w] : g.adjacency(v))
      if (u > v && p.assignment[u] == i) total += w;
  }
  return total;
}

}  // namespace edgefuse
