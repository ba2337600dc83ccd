#include "sgsr/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sgsr {

SymmetricMatrix SymmetricMatrix::from_dense(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) {
    throw InvalidInputError("SymmetricMatrix: matrix is not square");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) != m(j, i)) {
        std::ostringstream os;
        os << "SymmetricMatrix: entries (" << i << "," << j
           << ") differ across the diagonal";
        throw InvalidInputError(os.str());
      }
    }
  }
  return SymmetricMatrix(std::move(m));
}

EigDecomposition sym_eig(const SymmetricMatrix& m) {
  if (!m.dense().allFinite()) {
    throw InvalidInputError("sym_eig: matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense());
  if (solver.info() != Eigen::Success) {
    throw InvalidInputError("sym_eig: eigensolver failed to converge");
  }
  // SelfAdjointEigenSolver already returns eigenvalues in increasing order.
  return EigDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

SolveReport minres(const LinearOperator& apply, const Eigen::VectorXd& rhs,
                   double tol, int max_iter) {
  const Eigen::Index n = rhs.size();
  SolveReport report;
  report.solution = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    report.converged = true;
    return report;
  }

  const double rhs_norm = rhs.norm();
  const double goal = tol * std::max(1.0, rhs_norm);
  report.residual_history.push_back(rhs_norm);
  if (rhs_norm <= goal) {
    report.residual_norm = rhs_norm;
    report.converged = true;
    return report;
  }

  // Lanczos + Givens recurrence (van der Vorst's formulation). |eta| is the
  // current residual-norm estimate and is non-increasing by construction.
  Eigen::VectorXd v_new = rhs;
  Eigen::VectorXd v_old = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w_new = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w_old = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd& x = report.solution;

  double beta = rhs_norm;
  double eta = beta;
  double gamma_old = 1.0, gamma_new = 1.0;
  double sigma_old = 0.0, sigma_new = 0.0;

  int it = 0;
  while (it < max_iter) {
    ++it;
    v_new /= beta;
    Eigen::VectorXd q = apply(v_new);
    if (q.size() != n) {
      throw InvalidInputError("minres: operator changed the vector length");
    }
    const double alpha = v_new.dot(q);
    if (it > 1) {
      q -= beta * v_old;
    }
    v_old = q - alpha * v_new;

    const double delta = gamma_new * alpha - gamma_old * sigma_new * beta;
    const double rho3 = sigma_old * beta;
    const double rho2 = sigma_new * alpha + gamma_old * gamma_new * beta;
    const double beta_next = v_old.norm();
    const double rho1 = std::hypot(delta, beta_next);
    if (rho1 == 0.0) {
      // Zero pivot: nothing further can be extracted from the Krylov space.
      break;
    }

    if (it == 1) {
      w_old = v_new / rho1;
    } else if (it == 2) {
      w_old = (v_new - rho2 * w_new) / rho1;
    } else {
      w_old = (v_new - rho2 * w_new - rho3 * w_old) / rho1;
    }

    gamma_old = gamma_new;
    gamma_new = delta / rho1;
    x += gamma_new * eta * w_old;
    sigma_old = sigma_new;
    sigma_new = beta_next / rho1;
    eta = -sigma_new * eta;
    report.residual_history.push_back(std::abs(eta));

    if (std::abs(eta) <= goal) {
      break;
    }
    if (beta_next == 0.0) {
      // Krylov space exhausted; x already holds the minimal-residual iterate.
      break;
    }
    beta = beta_next;
    v_old.swap(v_new);
    w_old.swap(w_new);
  }

  report.iterations = it;
  report.residual_norm = (rhs - apply(x)).norm();
  report.converged = report.residual_norm <= goal;
  return report;
}

SolveReport minres_shifted(const SymmetricMatrix& m, double shift,
                           const Eigen::VectorXd& rhs, double tol,
                           int max_iter) {
  const Eigen::MatrixXd& a = m.dense();
  return minres(
      [&a, shift](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return a * x - shift * x;
      },
      rhs, tol, max_iter);
}

namespace {

double checked_eval(const std::function<double(double)>& f, double x) {
  const double fx = f(x);
  if (!std::isfinite(fx)) {
    std::ostringstream os;
    os << "minimize_scalar: non-finite objective value at x = " << x;
    throw InvalidFunctionError(x, os.str());
  }
  return fx;
}

}  // namespace

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo,
                              double hi, double tol, int max_evals) {
  if (!(lo < hi)) {
    throw InvalidInputError("minimize_scalar: requires lo < hi");
  }
  if (!(tol > 0.0) || max_evals < 1) {
    throw InvalidInputError("minimize_scalar: tol and max_evals must be positive");
  }

  constexpr double kGolden = 0.3819660112501051;  // 2 - golden ratio

  ScalarMinimum best;
  int evals = 0;
  auto eval = [&](double x) {
    const double fx = checked_eval(f, x);
    ++evals;
    if (evals == 1 || fx < best.f_min) {
      best.x_min = x;
      best.f_min = fx;
    }
    return fx;
  };

  // Endpoints participate so the result can never exceed either of them.
  eval(lo);
  if (max_evals > 1) {
    eval(hi);
  }

  double a = lo, b = hi;
  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = max_evals > 2 ? eval(x) : best.f_min;
  double fw = fx, fv = fx;
  double step = 0.0, step_prev = 0.0;
  const double min_step = tol / 8.0;

  while ((b - a) > tol && evals < max_evals) {
    const double mid = 0.5 * (a + b);
    bool parabolic = false;
    if (std::abs(step_prev) > min_step) {
      // Fit a parabola through (x, w, v); accept its vertex only when it lies
      // strictly inside the bracket and moves less than half the step before
      // last, otherwise fall back to a golden-section step.
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) {
        p = -p;
      }
      q = std::abs(q);
      const double step_before_last = step_prev;
      step_prev = step;
      if (std::abs(p) < std::abs(0.5 * q * step_before_last) &&
          p > q * (a - x) && p < q * (b - x)) {
        step = p / q;
        parabolic = true;
      }
    }
    if (!parabolic) {
      step_prev = (x >= mid) ? a - x : b - x;
      step = kGolden * step_prev;
    }
    double u = (std::abs(step) >= min_step)
                   ? x + step
                   : x + (step >= 0.0 ? min_step : -min_step);
    const double fu = eval(u);

    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      w = x;
      x = u;
      fv = fw;
      fw = fx;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        w = u;
        fv = fw;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }

  best.evaluations = evals;
  return best;
}

double gaussian_q(double x) {
  if (!std::isfinite(x)) {
    throw InvalidInputError("gaussian_q: non-finite argument");
  }
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double gaussian_pdf(double x) {
  if (!std::isfinite(x)) {
    throw InvalidInputError("gaussian_pdf: non-finite argument");
  }
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace sgsr
