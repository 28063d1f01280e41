#include <array>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <doctest.h>

#include "edgefuse/detail/rng.hpp"
#include "edgefuse/overlap_graph.hpp"

using namespace edgefuse;

namespace {

Eigen::MatrixXd random_weights(int v, double density, detail::SplitMix64& rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(v, v);
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j)
      if (rng.unit() < density) m(i, j) = m(j, i) = 0.5 * rng.unit();
  return m;
}

// Straight double loop over all vertex pairs; the production fitness walks
// adjacency lists instead.
double brute_fitness(const Eigen::MatrixXd& w, const Grouping& p) {
  double sum = 0.0;
  for (int u = 0; u < w.rows(); ++u)
    for (int v = u + 1; v < w.cols(); ++v)
      if (p.assignment[u] != p.assignment[v]) sum += w(u, v);
  return sum;
}

}  // namespace

TEST_CASE("matrix construction validates shape and range") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(OverlapGraph::from_matrix(bad), std::invalid_argument);

  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(2, 2);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(OverlapGraph::from_matrix(asym), std::invalid_argument);

  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(2, 2);
  big(0, 1) = big(1, 0) = 0.6;
  CHECK_THROWS_AS(OverlapGraph::from_matrix(big), std::invalid_argument);

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 0.1;
  CHECK_THROWS_AS(OverlapGraph::from_matrix(diag), std::invalid_argument);
}

TEST_CASE("zero-weight pairs are absent links") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = m(1, 0) = 0.2;
  auto g = OverlapGraph::from_matrix(m);
  CHECK(g.vertex_count() == 3);
  CHECK(g.link_count() == 1);
  CHECK(g.weight(0, 1) == 0.2);
  CHECK(g.weight(1, 0) == 0.2);
  CHECK(g.weight(0, 2) == 0.0);
  CHECK(g.weight(1, 1) == 0.0);
  CHECK(g.degree(2) == 0);
  CHECK(g.total_weight() == doctest::Approx(0.2));
}

TEST_CASE("from_links matches from_matrix") {
  std::vector<std::tuple<int, int, double>> links{{0, 1, 0.2}, {2, 1, 0.1}};
  auto g = OverlapGraph::from_links(4, links);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 1) = m(1, 0) = 0.2;
  m(1, 2) = m(2, 1) = 0.1;
  auto h = OverlapGraph::from_matrix(m);
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v) CHECK(g.weight(u, v) == h.weight(u, v));
  CHECK(g.link_count() == h.link_count());
}

TEST_CASE("neighbors") {
  SUBCASE("edgeless graph") {
    auto g = OverlapGraph::from_matrix(Eigen::MatrixXd::Zero(4, 4));
    CHECK(neighbors(g, 2).empty());
  }
  SUBCASE("triangle") {
    std::vector<std::tuple<int, int, double>> links{
        {0, 1, 0.1}, {1, 2, 0.1}, {0, 2, 0.1}};
    auto g = OverlapGraph::from_links(3, links);
    CHECK(neighbors(g, 0) == std::vector<int>{1, 2});
    CHECK(neighbors(g, 1) == std::vector<int>{0, 2});
  }
  SUBCASE("star center sees every leaf") {
    std::vector<std::tuple<int, int, double>> links{
        {2, 0, 0.1}, {2, 1, 0.2}, {2, 3, 0.3}, {2, 4, 0.4}};
    auto g = OverlapGraph::from_links(5, links);
    CHECK(neighbors(g, 2) == std::vector<int>{0, 1, 3, 4});
    CHECK(g.degree(2) == 4);
    CHECK(neighbors(g, 0) == std::vector<int>{2});
  }
  SUBCASE("out of range") {
    auto g = OverlapGraph::from_matrix(Eigen::MatrixXd::Zero(2, 2));
    CHECK_THROWS_AS(neighbors(g, 2), std::invalid_argument);
    CHECK_THROWS_AS(neighbors(g, -1), std::invalid_argument);
  }
}

TEST_CASE("grouping validation and introspection") {
  Grouping p{{0, 1, 0, 1}, 2};
  p.validate(4);
  CHECK(p.groups() == std::vector<std::vector<int>>{{0, 2}, {1, 3}});
  CHECK(p.group_sizes() == std::vector<int>{2, 2});
  CHECK(p.balanced());

  CHECK_THROWS_AS(p.validate(5), std::invalid_argument);
  Grouping bad{{0, 2}, 2};
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  Grouping lopsided{{0, 0, 0, 1}, 2};
  CHECK(!lopsided.balanced());
}

TEST_CASE("fitness basics") {
  std::vector<std::tuple<int, int, double>> links{{0, 1, 5.0 * 0.1}};
  auto g = OverlapGraph::from_links(4, links);

  Grouping one{{0, 0, 0, 0}, 1};
  CHECK(fitness(g, one) == 0.0);

  // single cross link carries its full weight
  Grouping split{{0, 1, 0, 1}, 2};
  CHECK(fitness(g, split) == 0.5);

  Grouping together{{0, 0, 1, 1}, 2};
  CHECK(fitness(g, together) == 0.0);

  Grouping mismatched{{0, 1}, 2};
  CHECK_THROWS_AS(fitness(g, mismatched), std::invalid_argument);
}

TEST_CASE("fitness equals the brute-force pair sum on random graphs") {
  detail::SplitMix64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    int v = 8;
    Eigen::MatrixXd m = random_weights(v, 0.4, rng);
    auto g = OverlapGraph::from_matrix(m);
    std::vector<int> order(v);
    for (int i = 0; i < v; ++i) order[i] = i;
    detail::shuffle_indices(order, rng);
    Grouping p;
    p.group_count = 2;
    p.assignment.resize(v);
    for (int i = 0; i < v; ++i) p.assignment[order[i]] = i % 2;
    CHECK(fitness(g, p) == doctest::Approx(brute_fitness(m, p)).epsilon(1e-12));
  }
}

TEST_CASE("in-group weight") {
  std::vector<std::tuple<int, int, double>> tri{
      {0, 1, 0.5}, {1, 2, 0.5}, {0, 2, 0.5}};
  auto g = OverlapGraph::from_links(4, tri);
  Grouping p{{0, 0, 0, 1}, 2};
  CHECK(in_group_weight(g, p, 0) == doctest::Approx(1.5));
  CHECK(in_group_weight(g, p, 1) == 0.0); // singleton
  CHECK_THROWS_AS(in_group_weight(g, p, 2), std::invalid_argument);
}

TEST_CASE("cross plus in-group weight conserves the total") {
  detail::SplitMix64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd m = random_weights(10, 0.5, rng);
    auto g = OverlapGraph::from_matrix(m);
    Grouping p;
    p.group_count = 3;
    p.assignment.resize(10);
    for (int i = 0; i < 10; ++i)
      p.assignment[i] = static_cast<int>(rng.bounded(3));
    double sum = fitness(g, p);
    for (int i = 0; i < 3; ++i) sum += in_group_weight(g, p, i);
    CHECK(sum == doctest::Approx(g.total_weight()).epsilon(1e-12));
  }
}

TEST_CASE("fitness is invariant under group relabeling") {
  detail::SplitMix64 rng(11);
  Eigen::MatrixXd m = random_weights(9, 0.5, rng);
  auto g = OverlapGraph::from_matrix(m);
  Grouping p{{0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
  // swap labels 0 and 2
  Grouping q = p;
  for (auto& a : q.assignment) a = (a == 0) ? 2 : (a == 2) ? 0 : a;
  CHECK(fitness(g, p) == fitness(g, q));
}
