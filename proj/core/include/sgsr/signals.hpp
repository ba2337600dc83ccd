#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "sgsr/graph.hpp"
#include "sgsr/random.hpp"

namespace sgsr {

/// A signal is one real value per node; a spectral signal is its coordinate
/// vector in the Laplacian eigenbasis.
using GraphSignal = Eigen::VectorXd;
using SpectralSignal = Eigen::VectorXd;

/// Orthonormal Laplacian eigenbasis: `eigenvalues` ascending, `eigenvectors`
/// holding the corresponding unit-norm columns.
struct GftBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  static GftBasis from_laplacian(const Laplacian& lap);
  int order() const { return static_cast<int>(eigenvalues.size()); }
};

SpectralSignal gft(const GftBasis& basis, const GraphSignal& x);
GraphSignal igft(const GftBasis& basis, const SpectralSignal& s);

/// Unit-norm signal supported on the `bw` lowest-frequency modes; the retained
/// spectral coefficients are drawn i.i.d. standard normal.
GraphSignal synth_bandlimited(const GftBasis& basis, int bw, RandomStream& rng);

/// Laplacian quadratic form x'Lx (0 for constant signals on connected graphs).
double smoothness(const Laplacian& lap, const GraphSignal& x);

/// Orthogonal projection onto the span of the `bw` lowest-frequency modes.
GraphSignal lowpass_project(const GftBasis& basis, int bw, const GraphSignal& x);

/// Per-node median over the closed neighborhood {k} ∪ N(k), ignoring weights;
/// even-sized neighborhoods take the mean of the two middle values.
GraphSignal median_filter(const Graph& g, const GraphSignal& x);

/// Plain-text dump: one value per line, 17 significant digits.
void write_signal(const GraphSignal& x, std::ostream& out);
GraphSignal read_signal(std::istream& in);

}  // namespace sgsr
