#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "hotdesk/error.hpp"
#include "hotdesk/graph.hpp"
#include "hotdesk/transport.hpp"

using namespace hotdesk;
using transport::NodeDistribution;

namespace {

graph::Network path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return graph::Network(n, e, 0);
}

NodeDistribution nd(std::vector<double> v) { return NodeDistribution(std::move(v)); }

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("path 0-1-2 examples") {
  auto cm = graph::all_pairs_shortest_paths(path_graph(3));
  auto r = transport::wasserstein(transport::point_mass(3, 0), transport::point_mass(3, 2), cm);
  CHECK(r.cost == doctest::Approx(2.0));
  CHECK(transport::ntd(transport::point_mass(3, 0), transport::point_mass(3, 2), cm) == 1.0);

  auto p = nd({0.5, 0.5, 0}), q = nd({0, 0.5, 0.5});
  CHECK(transport::wasserstein(p, q, cm).cost == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(transport::ntd(p, q, cm) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("identical inputs: zero cost and diagonal plan") {
  auto cm = graph::all_pairs_shortest_paths(path_graph(5));
  auto p = nd({0.1, 0.2, 0.3, 0.15, 0.25});
  auto r = transport::wasserstein(p, p, cm);
  CHECK(r.cost == 0.0);
  CHECK(transport::ntd(p, p, cm) == 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(r.plan(i, j) == doctest::Approx(i == j ? p[i] : 0.0));
  }
}

TEST_CASE("plan marginals") {
  std::mt19937_64 rng(5);
  auto edges = oracle::random_connected(15, 5, rng);
  auto cm = graph::all_pairs_shortest_paths(graph::Network(15, edges, 0));
  for (int trial = 0; trial < 20; ++trial) {
    auto p = nd(oracle::random_distribution(15, 6, rng));
    auto q = nd(oracle::random_distribution(15, 0, rng));
    auto r = transport::wasserstein(p, q, cm);
    double cost = 0.0;
    for (std::size_t i = 0; i < 15; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < 15; ++j) {
        CHECK(r.plan(i, j) >= 0.0);
        row += r.plan(i, j);
        col += r.plan(j, i);
        cost += r.plan(i, j) * cm(static_cast<int>(i), static_cast<int>(j));
      }
      CHECK(row == doctest::Approx(p[i]).epsilon(1e-9));
      CHECK(col == doctest::Approx(q[i]).epsilon(1e-9));
    }
    CHECK(cost == doctest::Approx(r.cost).epsilon(1e-12));
  }
}

TEST_CASE("solver matches vertex enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 5 + trial % 10;
    auto edges = oracle::random_connected(n, trial % 3, rng);
    auto cm = graph::all_pairs_shortest_paths(graph::Network(n, edges, 0));
    auto p = oracle::random_distribution(n, 1 + trial % 4, rng);
    auto q = oracle::random_distribution(n, 1 + (trial / 4) % 4, rng);
    const double expect = oracle::wasserstein_by_vertices(p, q, oracle::to_vectors(cm));
    CHECK(transport::wasserstein(nd(p), nd(q), cm).cost == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("solve_transportation on a dense table") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 3, n = 2 + (trial / 3) % 3;
    auto a = oracle::random_distribution(m, 0, rng), b = oracle::random_distribution(n, 0, rng);
    Matrix<double> c(m, n);
    std::vector<std::vector<double>> cv(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) cv[i][j] = c(i, j) = u(rng);
    }
    auto r = transport::solve_transportation(a, b, c);
    CHECK(r.cost == doctest::Approx(oracle::transport_by_vertices(a, b, cv)).epsilon(1e-9));
  }
}

TEST_CASE("tree closed form") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 10 + trial % 20;
    auto edges = oracle::random_connected(n, 0, rng);
    auto cm = graph::all_pairs_shortest_paths(graph::Network(n, edges, 0));
    auto p = oracle::random_distribution(n, 0, rng), q = oracle::random_distribution(n, 3, rng);
    CHECK(transport::wasserstein(nd(p), nd(q), cm).cost ==
          doctest::Approx(oracle::tree_w1(n, edges, p, q)).epsilon(1e-9));
  }
}

TEST_CASE("symmetry is bit exact") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + trial % 25;
    auto cm = graph::all_pairs_shortest_paths(graph::Network(n, oracle::random_connected(n, 4, rng), 0));
    auto p = nd(oracle::random_distribution(n, 0, rng)), q = nd(oracle::random_distribution(n, 5, rng));
    CHECK(transport::ntd(p, q, cm) == transport::ntd(q, p, cm));
  }
}

TEST_CASE("input validation") {
  auto cm = graph::all_pairs_shortest_paths(path_graph(3));
  CHECK_THROWS_AS(transport::ntd(nd({0.5, 0.4, 0}), nd({0, 0, 1}), cm), Error);
  CHECK_THROWS_AS(transport::ntd(nd({0.5, 0.5}), nd({0, 0, 1}), cm), Error);
  CHECK_THROWS_AS(transport::ntd(nd({1.5, -0.5, 0}), nd({0, 0, 1}), cm), Error);
  CHECK_THROWS_AS(transport::normalize(std::vector<double>{0, 0, 0}), Error);
  CHECK_THROWS_AS(transport::normalize(std::vector<double>{1, -1, 2}), Error);
  CHECK(transport::normalize(std::vector<double>{1, 1, 2}).mass == std::vector<double>{0.25, 0.25, 0.5});
  graph::Network single(1, {}, 0);
  auto cm1 = graph::all_pairs_shortest_paths(single);
  CHECK_THROWS_AS(transport::ntd(nd({1}), nd({1}), cm1), Error);
}

TEST_CASE("minmax_scale") {
  CHECK(transport::minmax_scale(std::vector<double>{0, 5, 10}, 0.0) == std::vector<double>{0, 0.5, 1});
  CHECK(transport::minmax_scale(std::vector<double>{3, 3, 3}, 0.1) == std::vector<double>{1, 1, 1});
  CHECK(transport::minmax_scale(std::vector<double>{-2, 7, 1}, 1.0) == std::vector<double>{1, 1, 1});
  auto s = transport::minmax_scale(std::vector<double>{0, 1, 2}, 0.2);
  CHECK(s[0] == doctest::Approx(0.2));
  CHECK(s[1] == doctest::Approx(0.6));
  CHECK(s[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(transport::minmax_scale(std::vector<double>{}, 0.1), Error);
  CHECK_THROWS_AS(transport::minmax_scale(std::vector<double>{1, 2}, 1.5), Error);
}

TEST_CASE("combine_weights") {
  const std::vector<double> x{0, 1, 2, 3};
  auto one = transport::combine_weights({{x}, {1.0}, 0.1});
  auto direct = transport::minmax_scale(x, 0.1);
  for (int i = 0; i < 4; ++i) CHECK(one[i] == doctest::Approx(direct[i]));
  auto flipped = transport::combine_weights({{x}, {-1.0}, 0.1});
  for (int i = 0; i < 4; ++i) CHECK(flipped[i] == doctest::Approx(one[3 - i]));

  // hand evaluation: mm(x1)=[0,1/3,2/3,1], mm(x2)=[1,0,1/3,1/3]; sum with
  // (1,-0.5) = [-1/2, 1/3, 1/2, 5/6]; rescaled = [0, 5/8, 3/4, 1]
  auto two = transport::combine_weights({{x, {3, 0, 1, 1}}, {1.0, -0.5}, 0.0});
  CHECK(two[0] == doctest::Approx(0.0));
  CHECK(two[1] == doctest::Approx(0.625));
  CHECK(two[2] == doctest::Approx(0.75));
  CHECK(two[3] == doctest::Approx(1.0));

  CHECK_THROWS_AS(transport::combine_weights({{x, {1, 2}}, {1.0, 1.0}, 0.1}), Error);
  CHECK_THROWS_AS(transport::combine_weights({{x}, {1.0, 1.0}, 0.1}), Error);
  CHECK_THROWS_AS(transport::combine_weights({{x}, {1.5}, 0.1}), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5), c(-1, 1), f(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(8), b(8);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double floor = f(rng);
    auto w = transport::combine_weights({{a, b}, {c(rng), c(rng)}, floor});
    for (double v : w) {
      CHECK(v >= floor - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("ntd_weighted") {
  auto net = path_graph(6);
  auto cm = graph::all_pairs_shortest_paths(net);
  auto p = nd({0.2, 0.2, 0.2, 0.1, 0.2, 0.1}), q = nd({0.1, 0.1, 0.1, 0.3, 0.1, 0.3});
  const std::vector<double> remote{0, 1, 2, 3, 4, 5};
  CHECK(transport::ntd_weighted(p, q, cm, {{remote}, {1.0}, 1.0}) == transport::ntd(p, q, cm));
  CHECK(transport::ntd_weighted(p, q, cm, {{{2, 2, 2, 2, 2, 2}}, {1.0}, 0.1}) == transport::ntd(p, q, cm));

  // Prediction diverges from truth at the far end of the path.
  auto truth = nd({0.4, 0.3, 0.2, 0.1, 0, 0});
  auto pred = nd({0.4, 0.3, 0.1, 0, 0.1, 0.1});
  const double pos = transport::ntd_weighted(pred, truth, cm, {{remote}, {1.0}, 0.1});
  const double neg = transport::ntd_weighted(pred, truth, cm, {{remote}, {-1.0}, 0.1});
  CHECK(pos > neg);

  // Same numbers from the oracle applied to the reweighted inputs.
  auto w = transport::combine_weights({{remote}, {1.0}, 0.1});
  std::vector<double> a(6), b(6);
  for (int i = 0; i < 6; ++i) {
    a[i] = pred[i] * w[i];
    b[i] = truth[i] * w[i];
  }
  a = transport::normalize(a).mass;
  b = transport::normalize(b).mass;
  CHECK(pos == doctest::Approx(oracle::wasserstein_by_vertices(a, b, oracle::to_vectors(cm)) / 5.0));

  CHECK_THROWS_AS(transport::ntd_weighted(p, q, cm, std::vector<double>{1, 1}), Error);
}

}  // TEST_SUITE
