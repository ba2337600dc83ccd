#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "sgsr/graph.hpp"
#include "sgsr/random.hpp"

using namespace sgsr;

namespace {

Graph path3() {
  SymmetricMatrix w(3);
  w.set(0, 1, 1.0);
  w.set(1, 2, 1.0);
  return Graph::from_weights(w);
}

}  // namespace

TEST_CASE("graph construction validates weights") {
  SymmetricMatrix loop(2);
  loop.set(0, 0, 1.0);
  CHECK_THROWS_AS(Graph::from_weights(loop), InvalidInputError);

  SymmetricMatrix neg(2);
  neg.set(0, 1, -0.5);
  CHECK_THROWS_AS(Graph::from_weights(neg), InvalidInputError);

  SymmetricMatrix ok(2);
  ok.set(0, 1, 0.75);
  const Graph g = Graph::from_weights(ok);
  CHECK(g.size() == 2);
  CHECK(g.weight(0, 1) == 0.75);
  CHECK(g.degrees()[0] == 0.75);
  CHECK(g.degrees()[1] == 0.75);
}

TEST_CASE("laplacian equals degree matrix minus weights") {
  SymmetricMatrix w(3);
  w.set(0, 1, 2.0);
  w.set(1, 2, 0.5);
  w.set(0, 2, 1.5);
  const Graph g = Graph::from_weights(w);
  const Laplacian lap = laplacian(g);
  CHECK(lap.matrix(0, 0) == doctest::Approx(3.5));
  CHECK(lap.matrix(1, 1) == doctest::Approx(2.5));
  CHECK(lap.matrix(2, 2) == doctest::Approx(2.0));
  CHECK(lap.matrix(0, 1) == doctest::Approx(-2.0));
  CHECK(lap.matrix(1, 2) == doctest::Approx(-0.5));
  CHECK(lap.matrix(0, 2) == doctest::Approx(-1.5));
  // Row sums vanish: the constant vector is in the null space.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  CHECK((lap.matrix.dense() * ones).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("laplacian quadratic form equals the weighted edge sum") {
  RandomStream rng(7);
  const Graph g = erdos_renyi(15, 0.4, 0.5, 1.0, rng);
  const Laplacian lap = laplacian(g);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd x(15);
    for (int i = 0; i < 15; ++i) {
      x[i] = rng.normal();
    }
    double edge_sum = 0.0;
    for (int i = 0; i < 15; ++i) {
      for (int j = i + 1; j < 15; ++j) {
        const double diff = x[i] - x[j];
        edge_sum += g.weight(i, j) * diff * diff;
      }
    }
    const double quad = x.dot(lap.matrix.dense() * x);
    CHECK(quad == doctest::Approx(edge_sum).epsilon(1e-12));
  }
}

TEST_CASE("connectivity check") {
  CHECK(is_connected(path3()));

  SymmetricMatrix split(4);
  split.set(0, 1, 1.0);
  split.set(2, 3, 1.0);
  CHECK(!is_connected(Graph::from_weights(split)));

  SymmetricMatrix lone(1);
  CHECK(is_connected(Graph::from_weights(lone)));
}

TEST_CASE("closed neighborhood is sorted and includes the node") {
  SymmetricMatrix w(5);
  w.set(3, 0, 1.0);
  w.set(3, 4, 1.0);
  w.set(1, 2, 1.0);
  const Graph g = Graph::from_weights(w);
  const std::vector<int> hood = closed_neighborhood(g, 3);
  CHECK(hood == std::vector<int>{0, 3, 4});
  CHECK(closed_neighborhood(g, 1) == std::vector<int>{1, 2});
  CHECK_THROWS_AS(closed_neighborhood(g, 5), InvalidInputError);
}

TEST_CASE("random graphs are connected, weighted in range, deterministic") {
  RandomStream rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const Graph g = erdos_renyi(20, 0.3, 0.5, 1.0, rng);
    CHECK(is_connected(g));
    for (int i = 0; i < 20; ++i) {
      for (int j = i + 1; j < 20; ++j) {
        const double w = g.weight(i, j);
        if (w != 0.0) {
          CHECK(w >= 0.5);
          CHECK(w <= 1.0);
        }
      }
    }
  }

  RandomStream r1(5);
  RandomStream r2(5);
  const Graph a = erdos_renyi(12, 0.4, 0.5, 1.0, r1);
  const Graph b = erdos_renyi(12, 0.4, 0.5, 1.0, r2);
  CHECK(a.weights().dense() == b.weights().dense());
}

TEST_CASE("edge probability matches the generator parameter") {
  // Unconditioned draws: the edge count is Binomial(n(n-1)/2, p).
  RandomStream rng(99);
  const int n = 16;
  const double p = 0.35;
  const int pairs = n * (n - 1) / 2;
  const int draws = 400;
  double total_edges = 0.0;
  for (int rep = 0; rep < draws; ++rep) {
    const Graph g = detail::erdos_renyi_single_draw(n, p, 0.5, 1.0, rng);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (g.weight(i, j) != 0.0) {
          total_edges += 1.0;
        }
      }
    }
  }
  const double mean_edges = total_edges / draws;
  const double expect = p * pairs;
  const double stderr_edges = std::sqrt(pairs * p * (1 - p) / draws);
  CHECK(std::abs(mean_edges - expect) < 5.0 * stderr_edges);
}

TEST_CASE("complete graph at p_link = 1") {
  RandomStream rng(3);
  const Graph g = erdos_renyi(6, 1.0, 0.5, 1.0, rng);
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      CHECK(g.weight(i, j) > 0.0);
    }
  }
}

TEST_CASE("generator surfaces parameter and budget failures") {
  RandomStream rng(1);
  CHECK_THROWS_AS(erdos_renyi(1, 0.5, 0.5, 1.0, rng), InvalidInputError);
  CHECK_THROWS_AS(erdos_renyi(5, 0.0, 0.5, 1.0, rng), InvalidInputError);
  CHECK_THROWS_AS(erdos_renyi(5, 1.5, 0.5, 1.0, rng), InvalidInputError);
  CHECK_THROWS_AS(erdos_renyi(5, 0.5, -1.0, 1.0, rng), InvalidInputError);
  // 40 nodes at p = 0.005 average ~4 edges: essentially never connected.
  CHECK_THROWS_AS(erdos_renyi(40, 0.005, 0.5, 1.0, rng, 3),
                  GraphGenerationError);
}

TEST_CASE("edge list round trip preserves weights exactly") {
  RandomStream rng(13);
  const Graph g = erdos_renyi(10, 0.5, 0.5, 1.0, rng);
  std::stringstream ss;
  write_edge_list(g, ss);
  const Graph back = read_edge_list(ss);
  REQUIRE(back.size() == g.size());
  CHECK(back.weights().dense() == g.weights().dense());
}

TEST_CASE("edge list reader rejects malformed lines") {
  std::stringstream ss("0 1 1.0\n2 two 0.5\n");
  try {
    read_edge_list(ss);
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.line() == 2);
  }
}
