#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

#include "sgsr/numerics.hpp"
#include "sgsr/random.hpp"

namespace sgsr {

/// Undirected weighted graph: symmetric nonnegative weights, zero diagonal,
/// degrees kept consistent with the weight matrix.
class Graph {
 public:
  static Graph from_weights(SymmetricMatrix weights);

  int size() const { return weights_.order(); }
  const SymmetricMatrix& weights() const { return weights_; }
  double weight(int i, int j) const { return weights_(i, j); }
  const Eigen::VectorXd& degrees() const { return degrees_; }

 private:
  Graph(SymmetricMatrix w, Eigen::VectorXd d);
  SymmetricMatrix weights_;
  Eigen::VectorXd degrees_;
};

/// Combinatorial Laplacian diag(degrees) - weights.
struct Laplacian {
  SymmetricMatrix matrix;
  int order() const { return matrix.order(); }
};

Laplacian laplacian(const Graph& g);

/// True iff every node is reachable from node 0 over positive-weight edges.
bool is_connected(const Graph& g);

/// {k} together with the positive-weight neighbors of k, ascending.
std::vector<int> closed_neighborhood(const Graph& g, int k);

/// Connected Erdős–Rényi graph: each pair is an edge with probability p_link,
/// edge weights i.i.d. uniform on [w_lo, w_hi]. Disconnected draws are thrown
/// away and the whole graph resampled, up to max_attempts, so the result is
/// ER conditioned on connectivity.
Graph erdos_renyi(int n, double p_link, double w_lo, double w_hi,
                  RandomStream& rng, int max_attempts = 1000);

namespace detail {
/// One unconditioned ER draw (no connectivity filter); exposed for
/// distribution-level tests.
Graph erdos_renyi_single_draw(int n, double p_link, double w_lo, double w_hi,
                              RandomStream& rng);
}  // namespace detail

/// Edge list "i j w" (0-based, one edge per line, 17 significant digits).
void write_edge_list(const Graph& g, std::ostream& out);

/// Inverse of write_edge_list; node count is max index + 1.
Graph read_edge_list(std::istream& in);

}  // namespace sgsr
