#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "sgsr/graph.hpp"
#include "sgsr/random.hpp"
#include "sgsr/signals.hpp"

using namespace sgsr;

namespace {

Graph random_graph(std::uint64_t seed, int n = 15) {
  RandomStream rng(seed);
  return erdos_renyi(n, 0.4, 0.5, 1.0, rng);
}

}  // namespace

TEST_CASE("spectral basis diagonalizes the laplacian") {
  const Graph g = random_graph(100);
  const Laplacian lap = laplacian(g);
  const GftBasis basis = GftBasis::from_laplacian(lap);
  REQUIRE(basis.order() == g.size());
  for (int i = 0; i + 1 < basis.order(); ++i) {
    CHECK(basis.eigenvalues[i] <= basis.eigenvalues[i + 1]);
  }
  // Connected graph: exactly one (near-)zero eigenvalue with a constant
  // eigenvector.
  CHECK(std::abs(basis.eigenvalues[0]) < 1e-10);
  CHECK(basis.eigenvalues[1] > 1e-8);
  const Eigen::VectorXd v0 = basis.eigenvectors.col(0);
  CHECK((v0.array() - v0[0]).abs().maxCoeff() < 1e-9);
  const Eigen::MatrixXd recon = basis.eigenvectors *
                                basis.eigenvalues.asDiagonal() *
                                basis.eigenvectors.transpose();
  CHECK((recon - lap.matrix.dense()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transform round trip and energy preservation") {
  const Graph g = random_graph(101);
  const GftBasis basis = GftBasis::from_laplacian(laplacian(g));
  RandomStream rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    GraphSignal x(g.size());
    for (int i = 0; i < g.size(); ++i) {
      x[i] = rng.normal();
    }
    const SpectralSignal s = gft(basis, x);
    const GraphSignal back = igft(basis, s);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gft(basis, GraphSignal::Zero(3)), InvalidInputError);
  CHECK_THROWS_AS(igft(basis, SpectralSignal::Zero(2)), InvalidInputError);
}

TEST_CASE("synthesized signals are unit norm and band limited") {
  const Graph g = random_graph(102);
  const GftBasis basis = GftBasis::from_laplacian(laplacian(g));
  RandomStream rng(8);
  for (int bw : {1, 2, 5}) {
    const GraphSignal x = synth_bandlimited(basis, bw, rng);
    CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const SpectralSignal s = gft(basis, x);
    for (int i = bw; i < basis.order(); ++i) {
      CHECK(std::abs(s[i]) < 1e-12);
    }
  }
  RandomStream r1(3), r2(3);
  CHECK(synth_bandlimited(basis, 2, r1) == synth_bandlimited(basis, 2, r2));
  CHECK_THROWS_AS(synth_bandlimited(basis, 0, rng), InvalidInputError);
  CHECK_THROWS_AS(synth_bandlimited(basis, basis.order() + 1, rng),
                  InvalidInputError);
}

TEST_CASE("smoothness equals the spectral weighted energy") {
  const Graph g = random_graph(103);
  const Laplacian lap = laplacian(g);
  const GftBasis basis = GftBasis::from_laplacian(lap);
  RandomStream rng(9);
  GraphSignal x(g.size());
  for (int i = 0; i < g.size(); ++i) {
    x[i] = rng.normal();
  }
  const SpectralSignal s = gft(basis, x);
  double spectral = 0.0;
  for (int i = 0; i < basis.order(); ++i) {
    spectral += basis.eigenvalues[i] * s[i] * s[i];
  }
  CHECK(smoothness(lap, x) == doctest::Approx(spectral).epsilon(1e-10));
  CHECK(smoothness(lap, GraphSignal::Constant(g.size(), 3.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lowpass projection is an idempotent contraction") {
  const Graph g = random_graph(104);
  const GftBasis basis = GftBasis::from_laplacian(laplacian(g));
  RandomStream rng(10);
  GraphSignal x(g.size());
  for (int i = 0; i < g.size(); ++i) {
    x[i] = rng.normal();
  }
  const GraphSignal p1 = lowpass_project(basis, 2, x);
  const GraphSignal p2 = lowpass_project(basis, 2, p1);
  CHECK((p2 - p1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(p1.norm() <= x.norm() + 1e-12);
  // A signal already inside the band is left alone.
  const GraphSignal band = synth_bandlimited(basis, 2, rng);
  CHECK((lowpass_project(basis, 2, band) - band).cwiseAbs().maxCoeff() < 1e-12);
  // Full-band projection is the identity.
  CHECK((lowpass_project(basis, basis.order(), x) - x).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("median filter on a path") {
  SymmetricMatrix w(3);
  w.set(0, 1, 1.0);
  w.set(1, 2, 1.0);
  const Graph g = Graph::from_weights(w);
  GraphSignal x(3);
  x << 1.0, 5.0, 2.0;
  const GraphSignal m = median_filter(g, x);
  CHECK(m[0] == doctest::Approx(3.0));   // mean of {1, 5}
  CHECK(m[1] == doctest::Approx(2.0));   // middle of {1, 2, 5}
  CHECK(m[2] == doctest::Approx(3.5));   // mean of {2, 5}
}

TEST_CASE("median filter averages the middle pair and ignores weights") {
  SymmetricMatrix w(4);
  w.set(0, 1, 0.6);
  w.set(0, 2, 0.9);
  w.set(0, 3, 0.5);
  const Graph star = Graph::from_weights(w);
  GraphSignal x(4);
  x << 10.0, 1.0, 2.0, 7.0;
  const GraphSignal m = median_filter(star, x);
  CHECK(m[0] == doctest::Approx(4.5));   // middle two of {1, 2, 7, 10}
  CHECK(m[1] == doctest::Approx(5.5));
  CHECK(m[2] == doctest::Approx(6.0));
  CHECK(m[3] == doctest::Approx(8.5));

  SymmetricMatrix u(4);
  u.set(0, 1, 1.0);
  u.set(0, 2, 1.0);
  u.set(0, 3, 1.0);
  const GraphSignal m2 = median_filter(Graph::from_weights(u), x);
  CHECK(m2 == m);
}

TEST_CASE("signal text round trip") {
  GraphSignal x(4);
  x << 1.0 / 3.0, -2.5, 1e-17, 4.0;
  std::stringstream ss;
  write_signal(x, ss);
  const GraphSignal back = read_signal(ss);
  REQUIRE(back.size() == 4);
  CHECK(back == x);

  std::stringstream bad("1.0\nnope\n");
  try {
    read_signal(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.line() == 2);
  }
}
