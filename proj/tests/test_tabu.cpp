#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <doctest.h>

#include "edgefuse/detail/rng.hpp"
#include "edgefuse/tabu.hpp"

using namespace edgefuse;

namespace {

// Dyadic weights make every fitness value and swap delta exact, so the
// reference below (which re-prices each candidate swap from scratch) tracks
// the incremental production arithmetic bit for bit.
Eigen::MatrixXd random_dyadic_weights(int v, double density,
                                      detail::SplitMix64& rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(v, v);
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j)
      if (rng.unit() < density)
        m(i, j) = m(j, i) = static_cast<double>(1 + rng.bounded(1024)) / 2048.0;
  return m;
}

Grouping random_balanced(int v, int n, detail::SplitMix64& rng) {
  std::vector<int> order(v);
  for (int i = 0; i < v; ++i) order[i] = i;
  detail::shuffle_indices(order, rng);
  Grouping p;
  p.group_count = n;
  p.assignment.resize(v);
  for (int i = 0; i < v; ++i) p.assignment[order[i]] = i % n;
  return p;
}

// Plain transcription of the swap search: evaluates each cross-group swap by
// copying the grouping and recomputing fitness, with the same aspiration,
// FIFO, and all-tabu fallback rules.
Grouping reference_tabu(const OverlapGraph& g, const Grouping& p0,
                        const TabuConfig& cfg) {
  Grouping current = p0;
  Grouping best = p0;
  double current_f = fitness(g, current);
  double best_f = current_f;
  std::deque<VertexPair> tabu;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    int chosen_u = -1, chosen_v = -1;
    double chosen_f = std::numeric_limits<double>::infinity();
    bool chosen_tabu = false;
    int oldest_u = -1, oldest_v = -1;
    std::size_t oldest_pos = std::numeric_limits<std::size_t>::max();

    for (int u = 0; u < g.vertex_count(); ++u) {
      for (int v = u + 1; v < g.vertex_count(); ++v) {
        if (current.assignment[u] == current.assignment[v]) continue;
        Grouping moved = current;
        std::swap(moved.assignment[u], moved.assignment[v]);
        double moved_f = fitness(g, moved);
        auto it = std::find(tabu.begin(), tabu.end(), VertexPair{u, v});
        bool is_tabu = it != tabu.end();
        if (!is_tabu || moved_f < best_f) {
          if (moved_f < chosen_f) {
            chosen_u = u;
            chosen_v = v;
            chosen_f = moved_f;
            chosen_tabu = is_tabu;
          }
        }
        if (is_tabu) {
          auto pos = static_cast<std::size_t>(it - tabu.begin());
          if (pos < oldest_pos) {
            oldest_pos = pos;
            oldest_u = u;
            oldest_v = v;
          }
        }
      }
    }

    if (chosen_u < 0) {
      if (oldest_u < 0) break;
      chosen_u = oldest_u;
      chosen_v = oldest_v;
      chosen_tabu = true;
    }

    std::swap(current.assignment[chosen_u], current.assignment[chosen_v]);
    current_f = fitness(g, current);
    if (chosen_tabu)
      tabu.erase(std::find(tabu.begin(), tabu.end(), VertexPair{chosen_u, chosen_v}));
    tabu.push_back({chosen_u, chosen_v});
    while (tabu.size() > cfg.tabu_capacity) tabu.pop_front();
    if (current_f < best_f) {
      best_f = current_f;
      best = current;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("tabu list is a bounded FIFO of unique pairs") {
  CHECK_THROWS_AS(TabuList(0), std::invalid_argument);

  TabuList t(3);
  CHECK(t.capacity() == 3);
  t.push({0, 1});
  t.push({0, 2});
  t.push({1, 2});
  CHECK(t.size() == 3);
  CHECK(t.contains({0, 1}));
  CHECK(t.position({0, 1}) == 0);
  CHECK(t.position({1, 2}) == 2);

  t.push({2, 3}); // evicts the oldest
  CHECK(t.size() == 3);
  CHECK(!t.contains({0, 1}));
  CHECK(t.position({0, 2}) == 0);

  t.remove({1, 2});
  CHECK(t.size() == 2);
  CHECK(!t.position({1, 2}).has_value());
  t.remove({9, 9}); // absent: no-op
  CHECK(t.size() == 2);
}

TEST_CASE("config validation") {
  TabuConfig c;
  c.validate();
  c.max_iterations = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.max_iterations = 0;
  c.tabu_capacity = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("zero iterations returns the input unchanged") {
  std::vector<std::tuple<int, int, double>> links{{0, 1, 0.5}, {2, 3, 0.5}};
  auto g = OverlapGraph::from_links(4, links);
  Grouping p0{{0, 1, 0, 1}, 2};
  TabuConfig cfg;
  cfg.max_iterations = 0;
  CHECK(tabu_optimize(g, p0, cfg) == p0);
}

TEST_CASE("input validation") {
  auto g = OverlapGraph::from_matrix(Eigen::MatrixXd::Zero(4, 4));
  Grouping lopsided{{0, 0, 0, 1}, 2};
  CHECK_THROWS_AS(tabu_optimize(g, lopsided), std::invalid_argument);
  Grouping wrong_size{{0, 1}, 2};
  CHECK_THROWS_AS(tabu_optimize(g, wrong_size), std::invalid_argument);
}

TEST_CASE("weighted path escapes the worst split") {
  // path 0-1-2-3, strong ends (0.5) and a faint middle (0.1); starting from
  // {0,2} | {1,3} (fitness 1.1) the optimum {0,1} | {2,3} has fitness 0.1
  std::vector<std::tuple<int, int, double>> links{
      {0, 1, 0.5}, {1, 2, 0.1}, {2, 3, 0.5}};
  auto g = OverlapGraph::from_links(4, links);
  Grouping p0{{0, 1, 0, 1}, 2};
  REQUIRE(fitness(g, p0) == doctest::Approx(1.1));

  // brute force over the three balanced splits of four vertices
  double optimum = std::numeric_limits<double>::infinity();
  for (int partner : {1, 2, 3}) {
    Grouping p{{0, 1, 1, 1}, 2};
    p.assignment[partner] = 0;
    optimum = std::min(optimum, fitness(g, p));
  }
  REQUIRE(optimum == doctest::Approx(0.1));

  Grouping out = tabu_optimize(g, p0);
  CHECK(fitness(g, out) == doctest::Approx(0.1));
  CHECK(out.assignment[0] == out.assignment[1]);
  CHECK(out.assignment[2] == out.assignment[3]);
  CHECK(out.assignment[0] != out.assignment[2]);

  // a single iteration already lands the best swap
  TabuConfig one;
  one.max_iterations = 1;
  CHECK(fitness(g, tabu_optimize(g, p0, one)) == doctest::Approx(0.1));
}

TEST_CASE("all-equal weights leave fitness unchanged") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(4, 4, 0.3);
  m.diagonal().setZero();
  auto g = OverlapGraph::from_matrix(m);
  Grouping p0{{0, 1, 0, 1}, 2};
  Grouping out = tabu_optimize(g, p0);
  CHECK(fitness(g, out) == doctest::Approx(fitness(g, p0)));
}

TEST_CASE("never worse than the start and sizes are preserved") {
  detail::SplitMix64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    int v = 6 + static_cast<int>(rng.bounded(8));
    int n = 2 + static_cast<int>(rng.bounded(2));
    auto g = OverlapGraph::from_matrix(random_dyadic_weights(v, 0.4, rng));
    Grouping p0 = random_balanced(v, n, rng);
    Grouping out = tabu_optimize(g, p0);
    out.validate(v);
    CHECK(fitness(g, out) <= fitness(g, p0));
    auto s0 = p0.group_sizes();
    auto s1 = out.group_sizes();
    std::sort(s0.begin(), s0.end());
    std::sort(s1.begin(), s1.end());
    CHECK(s0 == s1);
  }
}

TEST_CASE("matches the recompute-everything reference") {
  detail::SplitMix64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    int v = 4 + static_cast<int>(rng.bounded(7));
    int n = 2 + static_cast<int>(rng.bounded(2));
    if (n > v) n = v;
    auto g = OverlapGraph::from_matrix(random_dyadic_weights(v, 0.5, rng));
    Grouping p0 = random_balanced(v, n, rng);
    TabuConfig cfg;
    cfg.max_iterations = static_cast<int>(rng.bounded(13));
    cfg.tabu_capacity = 1 + rng.bounded(5);
    CHECK(tabu_optimize(g, p0, cfg) == reference_tabu(g, p0, cfg));
  }
}

TEST_CASE("tiny neighborhoods with a large tabu list still make progress") {
  // one cross pair after the first move is repeatedly tabu; the fallback must
  // keep the search alive instead of deadlocking
  std::vector<std::tuple<int, int, double>> links{{0, 1, 0.5}, {1, 2, 0.1}};
  auto g = OverlapGraph::from_links(3, links);
  Grouping p0{{0, 1, 0}, 2}; // {0,2} | {1}, fitness 0.6
  TabuConfig cfg;
  cfg.max_iterations = 25;
  cfg.tabu_capacity = 10;
  Grouping out = tabu_optimize(g, p0, cfg);
  CHECK(fitness(g, out) <= 0.2);
  CHECK(out == reference_tabu(g, p0, cfg));
}
