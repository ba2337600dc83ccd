#pragma once

#include <Eigen/Core>

#include <functional>
#include <utility>
#include <vector>

#include "sgsr/errors.hpp"

namespace sgsr {

/// Dense real symmetric matrix. Symmetry is exact: the constructor rejects any
/// matrix with entries[i][j] != entries[j][i], and set() writes both slots.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(int order)
      : data_(Eigen::MatrixXd::Zero(order, order)) {}

  static SymmetricMatrix from_dense(Eigen::MatrixXd m);

  int order() const { return static_cast<int>(data_.rows()); }
  double operator()(int i, int j) const { return data_(i, j); }
  void set(int i, int j, double v) {
    data_(i, j) = v;
    data_(j, i) = v;
  }
  const Eigen::MatrixXd& dense() const { return data_; }

 private:
  explicit SymmetricMatrix(Eigen::MatrixXd m) : data_(std::move(m)) {}
  Eigen::MatrixXd data_;
};

/// Outcome of an iterative linear solve. `converged` means the final residual
/// satisfied the requested tolerance relative to max(1, ||rhs||); otherwise
/// `solution` is the best-residual iterate seen. `residual_history` logs the
/// estimated residual norm after each iteration.
struct SolveReport {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

struct EigDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
};

/// Full eigendecomposition of a symmetric matrix, eigenvalues ascending.
/// Throws InvalidInputError on non-finite entries.
EigDecomposition sym_eig(const SymmetricMatrix& m);

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// MINRES for symmetric (possibly indefinite or singular) operators.
/// Starts from zero, runs until ||r|| <= tol * max(1, ||rhs||) or max_iter.
/// Non-convergence is reported, not thrown.
SolveReport minres(const LinearOperator& apply, const Eigen::VectorXd& rhs,
                   double tol, int max_iter);

/// Convenience overload for an explicit shifted matrix-vector product
/// (m - shift*I) x without forming the shifted matrix.
SolveReport minres_shifted(const SymmetricMatrix& m, double shift,
                           const Eigen::VectorXd& rhs, double tol,
                           int max_iter);

struct ScalarMinimum {
  double x_min = 0.0;
  double f_min = 0.0;
  int evaluations = 0;
};

/// Derivative-free minimization on [lo, hi]: golden-section bracketing with a
/// parabolic-interpolation step whenever the fitted vertex lands inside the
/// bracket and shrinks it. Endpoints are evaluated too, so the result never
/// exceeds f(lo) or f(hi). Throws InvalidFunctionError (with the abscissa) if
/// f returns a non-finite value.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo,
                              double hi, double tol, int max_evals);

/// Upper tail of the standard normal: integral of the density over [x, inf).
double gaussian_q(double x);

/// Standard normal density.
double gaussian_pdf(double x);

}  // namespace sgsr
