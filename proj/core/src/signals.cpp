#include "sgsr/signals.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgsr/errors.hpp"
#include "sgsr/numerics.hpp"

namespace sgsr {

GftBasis GftBasis::from_laplacian(const Laplacian& lap) {
  EigDecomposition eig = sym_eig(lap.matrix);
  return GftBasis{std::move(eig.eigenvalues), std::move(eig.eigenvectors)};
}

SpectralSignal gft(const GftBasis& basis, const GraphSignal& x) {
  if (x.size() != basis.order()) {
    throw InvalidInputError("gft: signal length does not match basis order");
  }
  return basis.eigenvectors.transpose() * x;
}

GraphSignal igft(const GftBasis& basis, const SpectralSignal& s) {
  if (s.size() != basis.order()) {
    throw InvalidInputError("igft: coefficient length does not match basis order");
  }
  return basis.eigenvectors * s;
}

GraphSignal synth_bandlimited(const GftBasis& basis, int bw, RandomStream& rng) {
  const int n = basis.order();
  if (bw < 1 || bw > n) {
    throw InvalidInputError("synth_bandlimited: bandwidth out of range");
  }
  SpectralSignal s = SpectralSignal::Zero(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < bw; ++i) {
      s[i] = rng.normal();
    }
    norm = s.norm();
  } while (norm == 0.0);
  GraphSignal x = igft(basis, s);
  return x / x.norm();
}

double smoothness(const Laplacian& lap, const GraphSignal& x) {
  if (x.size() != lap.order()) {
    throw InvalidInputError("smoothness: signal length does not match Laplacian");
  }
  return x.dot(lap.matrix.dense() * x);
}

GraphSignal lowpass_project(const GftBasis& basis, int bw, const GraphSignal& x) {
  const int n = basis.order();
  if (bw < 1 || bw > n) {
    throw InvalidInputError("lowpass_project: bandwidth out of range");
  }
  if (x.size() != n) {
    throw InvalidInputError("lowpass_project: signal length does not match basis");
  }
  const auto low = basis.eigenvectors.leftCols(bw);
  return low * (low.transpose() * x);
}

GraphSignal median_filter(const Graph& g, const GraphSignal& x) {
  if (x.size() != g.size()) {
    throw InvalidInputError("median_filter: signal length does not match graph");
  }
  GraphSignal out(g.size());
  std::vector<double> vals;
  for (int k = 0; k < g.size(); ++k) {
    vals.clear();
    for (int j : closed_neighborhood(g, k)) {
      vals.push_back(x[j]);
    }
    std::sort(vals.begin(), vals.end());
    const std::size_t m = vals.size();
    out[k] = (m % 2 == 1) ? vals[m / 2]
                          : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
  }
  return out;
}

void write_signal(const GraphSignal& x, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", x[i]);
    out << buf << '\n';
  }
}

GraphSignal read_signal(std::istream& in) {
  std::vector<double> vals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) {
      throw ParseError(line_no, "expected one real value per line");
    }
    vals.push_back(v);
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

}  // namespace sgsr
