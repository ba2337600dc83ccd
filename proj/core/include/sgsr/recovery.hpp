#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <utility>
#include <vector>

#include "sgsr/graph.hpp"
#include "sgsr/numerics.hpp"
#include "sgsr/signals.hpp"

namespace sgsr {

/// Ratio R(z) = (z'Bz + 2b'z + alpha) / (z'z + beta) obtained by fixing the
/// honest entries of a signal and freeing the flagged ones: B is the
/// flagged-block Laplacian submatrix, b couples the free entries to the kept
/// honest values x0, alpha is the honest-block quadratic form, beta = ||x0||^2.
struct FractionalProblem {
  std::vector<int> honest_indices;
  std::vector<int> flagged_indices;
  Eigen::VectorXd x0;
  SymmetricMatrix B;
  Eigen::VectorXd b;
  double alpha = 0.0;
  double beta = 0.0;

  FractionalProblem() : B(0) {}

  int free_count() const { return static_cast<int>(flagged_indices.size()); }
  double numerator(const Eigen::VectorXd& z) const;
  double denominator(const Eigen::VectorXd& z) const;
  /// numerator(z) - gamma * denominator(z).
  double parametric(const Eigen::VectorXd& z, double gamma) const;
  /// Gradient of the parametric objective: 2Bz + 2b - 2*gamma*z.
  Eigen::VectorXd parametric_gradient(const Eigen::VectorXd& z,
                                      double gamma) const;
};

/// Iteration log of the ratio minimization. `gammas` records the initial
/// ratio followed by each accepted (strictly decreasing) ratio value;
/// `inner_reports` records every inner linear solve including safeguarded
/// retries. On converged = false the caller should fall back.
struct DinkelbachTrace {
  std::vector<double> gammas;
  std::vector<SolveReport> inner_reports;
  bool converged = false;
  Eigen::VectorXd final_z;
  double final_gamma = 0.0;
};

enum class FallbackPolicy {
  lowpass,      // project the observation onto the low-frequency subspace
  passthrough,  // return the observation unchanged
};

struct RecoveryConfig {
  double epsilon = 1e-9;      // ratio-iteration stopping tolerance
  int max_outer = 100;        // outer iteration budget (including retries)
  double minres_tol = 1e-10;  // inner solver residual tolerance
  int minres_max_iter = 0;    // <= 0 means 10 * system size
  FallbackPolicy fallback = FallbackPolicy::lowpass;
  int bw = 2;                 // bandwidth used by the lowpass fallback
};

/// Extracts the fractional problem for the given 0/1 mask (1 = flagged/free).
/// Throws DegeneratePartitionError when no node is honest or the honest
/// entries are all zero (beta = 0).
FractionalProblem build_problem(const Laplacian& lap, const GraphSignal& x,
                                const Eigen::VectorXi& mask);

double ratio(const FractionalProblem& problem, const Eigen::VectorXd& z);

/// Ratio minimization: each step solves the stationary system
/// (B - gamma I) z = -b with MINRES and proposes the new ratio. Steps that do
/// not strictly improve the best-so-far ratio (or whose inner solve fails)
/// trigger a bisection safeguard against a spectral lower bound on the ratio,
/// computed lazily from the (m+1)-point eigenproblem that oracle_fractional_min
/// uses. Terminates when |numerator(z) - gamma * denominator(z)| < epsilon.
DinkelbachTrace dinkelbach_solve(const FractionalProblem& problem,
                                 const RecoveryConfig& cfg);

/// Closed-form minimizer via the augmented eigenproblem: R(z) equals a
/// Rayleigh quotient of w = [z; 1], so the minimum over z is the smallest
/// eigenvalue of the scaled augmented matrix whose eigenvector has a nonzero
/// last coordinate. Independent of the iterative path; used as an oracle.
std::pair<Eigen::VectorXd, double> oracle_fractional_min(
    const FractionalProblem& problem);

/// Honest entries copied from x bit-for-bit, flagged entries replaced by z in
/// ascending flagged order.
GraphSignal assemble(const GraphSignal& x, const Eigen::VectorXi& mask,
                     const Eigen::VectorXd& z);

struct RecoveryResult {
  GraphSignal estimate;
  DinkelbachTrace trace;
  bool used_fallback = false;
  FallbackPolicy fallback_used = FallbackPolicy::lowpass;
};

/// build_problem -> dinkelbach_solve -> assemble, falling back per
/// cfg.fallback on a degenerate partition or non-convergence. An empty mask
/// returns the input unchanged with a trivially converged trace.
RecoveryResult recover(const Laplacian& lap, const GraphSignal& x,
                       const Eigen::VectorXi& mask, const RecoveryConfig& cfg);

/// Per-iteration "gamma inner_residual" lines for convergence plots.
void write_trace(const DinkelbachTrace& trace, std::ostream& out);

}  // namespace sgsr
