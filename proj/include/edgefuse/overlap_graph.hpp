#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace edgefuse {

// Undirected weighted graph over robot indices 0..V-1. Links exist only for
// strictly positive weights; adjacency lists are sorted by neighbor index.
class OverlapGraph {
 public:
  OverlapGraph() = default;

  // weights must be square, symmetric, zero-diagonal, entries in [0, 0.5].
  static OverlapGraph from_matrix(const Eigen::MatrixXd& weights);
  // Sparse equivalent; weights obey the same bounds, pairs must be unique.
  static OverlapGraph from_links(int vertex_count,
                                 std::span<const std::tuple<int, int, double>> links);

  int vertex_count() const { return vertex_count_; }
  std::size_t link_count() const { return link_count_; }
  // 0.0 for non-adjacent pairs and for u == v.
  double weight(int u, int v) const;
  const std::vector<std::pair<int, double>>& adjacency(int v) const;
  int degree(int v) const;
  double total_weight() const { return total_weight_; }

 private:
  int vertex_count_ = 0;
  std::size_t link_count_ = 0;
  double total_weight_ = 0.0;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

// Partition of the vertices into group_count groups, stored as a per-vertex
// group index.
struct Grouping {
  std::vector<int> assignment; // vertex -> group in [0, group_count)
  int group_count = 0;

  std::vector<std::vector<int>> groups() const; // members ascending per group
  std::vector<int> group_sizes() const;
  bool balanced() const; // max group size - min group size <= 1

  void validate(int vertex_count) const;

  bool operator==(const Grouping&) const = default;
};

std::vector<int> neighbors(const OverlapGraph& g, int v);

// Total weight of links crossing group boundaries; the quantity the grouping
// stage minimizes.
double fitness(const OverlapGraph& g, const Grouping& p);

// Total weight of links with both endpoints inside group i.
double in_group_weight(const OverlapGraph& g, const Grouping& p, int i);

}  // namespace edgefuse
