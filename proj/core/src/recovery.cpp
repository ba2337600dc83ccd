#include "sgsr/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>

#include "sgsr/errors.hpp"

namespace sgsr {

double FractionalProblem::numerator(const Eigen::VectorXd& z) const {
  return z.dot(B.dense() * z) + 2.0 * b.dot(z) + alpha;
}

double FractionalProblem::denominator(const Eigen::VectorXd& z) const {
  return z.squaredNorm() + beta;
}

double FractionalProblem::parametric(const Eigen::VectorXd& z,
                                     double gamma) const {
  return numerator(z) - gamma * denominator(z);
}

Eigen::VectorXd FractionalProblem::parametric_gradient(const Eigen::VectorXd& z,
                                                       double gamma) const {
  return 2.0 * (B.dense() * z) + 2.0 * b - 2.0 * gamma * z;
}

FractionalProblem build_problem(const Laplacian& lap, const GraphSignal& x,
                                const Eigen::VectorXi& mask) {
  const int n = lap.order();
  if (x.size() != n || mask.size() != n) {
    throw InvalidInputError("build_problem: dimension mismatch");
  }
  FractionalProblem p;
  for (int i = 0; i < n; ++i) {
    if (mask[i] != 0 && mask[i] != 1) {
      throw InvalidInputError("build_problem: mask entries must be 0 or 1");
    }
    (mask[i] ? p.flagged_indices : p.honest_indices).push_back(i);
  }
  if (p.honest_indices.empty()) {
    throw DegeneratePartitionError("build_problem: every node is flagged");
  }
  const int h = static_cast<int>(p.honest_indices.size());
  const int m = static_cast<int>(p.flagged_indices.size());
  p.x0.resize(h);
  for (int j = 0; j < h; ++j) {
    p.x0[j] = x[p.honest_indices[j]];
  }
  p.beta = p.x0.squaredNorm();
  if (p.beta == 0.0) {
    throw DegeneratePartitionError("build_problem: honest entries carry zero energy");
  }
  p.B = SymmetricMatrix(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      p.B.set(i, j, lap.matrix(p.flagged_indices[i], p.flagged_indices[j]));
    }
  }
  p.b.resize(m);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < h; ++j) {
      acc += lap.matrix(p.flagged_indices[i], p.honest_indices[j]) * p.x0[j];
    }
    p.b[i] = acc;
  }
  p.alpha = 0.0;
  for (int i = 0; i < h; ++i) {
    double row = 0.0;
    for (int j = 0; j < h; ++j) {
      row += lap.matrix(p.honest_indices[i], p.honest_indices[j]) * p.x0[j];
    }
    p.alpha += p.x0[i] * row;
  }
  return p;
}

double ratio(const FractionalProblem& problem, const Eigen::VectorXd& z) {
  if (z.size() != problem.free_count()) {
    throw InvalidInputError("ratio: z length does not match flagged count");
  }
  return problem.numerator(z) / problem.denominator(z);
}

namespace {

/// Scaled augmented matrix whose Rayleigh quotient over w = [z; t] extends
/// R(z) (t = 1 after scaling); its smallest eigenvalue lower-bounds the ratio.
SymmetricMatrix augmented_matrix(const FractionalProblem& p) {
  const int m = p.free_count();
  const double root_beta = std::sqrt(p.beta);
  SymmetricMatrix a(m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      a.set(i, j, p.B(i, j));
    }
    a.set(i, m, p.b[i] / root_beta);
  }
  a.set(m, m, p.alpha / p.beta);
  return a;
}

double ratio_lower_bound(const FractionalProblem& p) {
  return sym_eig(augmented_matrix(p)).eigenvalues[0];
}

}  // namespace

DinkelbachTrace dinkelbach_solve(const FractionalProblem& problem,
                                 const RecoveryConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !(cfg.minres_tol > 0.0) || cfg.max_outer < 1) {
    throw InvalidInputError("dinkelbach_solve: invalid tolerances or budget");
  }
  const int m = problem.free_count();
  DinkelbachTrace trace;
  const double gamma0 = problem.alpha / problem.beta;
  trace.gammas.push_back(gamma0);
  trace.final_gamma = gamma0;
  trace.final_z = Eigen::VectorXd::Zero(m);
  if (m == 0) {
    trace.converged = true;
    return trace;
  }

  const Eigen::VectorXd rhs = -problem.b;
  const int max_inner =
      cfg.minres_max_iter > 0 ? cfg.minres_max_iter : 10 * m;
  const double stationarity_goal =
      10.0 * cfg.minres_tol * std::max(1.0, problem.b.norm());

  Eigen::VectorXd z_best = Eigen::VectorXd::Zero(m);
  double gamma_best = gamma0;
  double gamma_cur = gamma0;
  std::optional<double> ratio_floor;     // pencil bound, computed on demand
  std::optional<double> spectrum_floor;  // smallest eigenvalue of B

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    trace.inner_reports.push_back(
        minres_shifted(problem.B, gamma_cur, rhs, cfg.minres_tol, max_inner));
    const SolveReport& rep = trace.inner_reports.back();
    bool advanced = false;
    if (rep.converged) {
      const Eigen::VectorXd& z = rep.solution;
      const double num = problem.numerator(z);
      const double den = problem.denominator(z);
      const double gamma_new = num / den;
      const double gap = num - gamma_cur * den;
      if (std::isfinite(gamma_new) && std::isfinite(gap)) {
        if (!spectrum_floor) {
          spectrum_floor = sym_eig(problem.B).eigenvalues[0];
        }
        // At shifts above the spectrum of the quadratic block the stationary
        // point is a saddle of the subproblem, so neither the gap rule nor
        // the textbook update can be trusted there.
        const bool convex_shift =
            gamma_cur <=
            *spectrum_floor + 1e-9 * std::max(1.0, std::abs(*spectrum_floor));
        // The stopping rule is an absolute bound on the parametric gap; when
        // the minimizer is large the gap can only be checked up to the
        // rounding error of evaluating it, so widen the bound by that much.
        const double gap_tol =
            cfg.epsilon +
            16.0 * (m + 1) * std::numeric_limits<double>::epsilon() *
                (std::abs(num) + std::abs(gamma_cur) * den);
        if (convex_shift && std::abs(gap) < gap_tol) {
          const double mono_slack =
              16.0 * std::numeric_limits<double>::epsilon() *
              std::max(1.0, std::abs(gamma_best));
          const double stationarity =
              (problem.B.dense() * z - gamma_new * z + problem.b).norm();
          if (gamma_new <= gamma_best + mono_slack &&
              stationarity <= stationarity_goal) {
            if (gamma_new < gamma_best) {
              trace.gammas.push_back(gamma_new);
            }
            trace.final_z = z;
            trace.final_gamma = gamma_new;
            trace.converged = true;
            return trace;
          }
        }
        if (gamma_new < gamma_best) {
          gamma_best = gamma_new;
          z_best = z;
          trace.gammas.push_back(gamma_new);
        }
        if (convex_shift && gamma_new < gamma_cur) {
          // Textbook step: with a convex subproblem the stationary point is
          // its global minimum and the proposed ratio strictly descends.
          gamma_cur = gamma_new;
          advanced = true;
        }
      }
    }
    if (!advanced) {
      // Saddle shift, failed inner solve, or no descent available: bisect
      // the shift toward the certified lower bound of the ratio and retry.
      // Once the shift drops below the spectrum of the quadratic block the
      // subproblem turns convex and descent resumes.
      if (!ratio_floor) {
        ratio_floor = ratio_lower_bound(problem);
      }
      gamma_cur = 0.5 * (std::min(*ratio_floor, gamma_cur) + gamma_cur);
    }
  }
  trace.final_z = z_best;
  trace.final_gamma = gamma_best;
  trace.converged = false;
  return trace;
}

std::pair<Eigen::VectorXd, double> oracle_fractional_min(
    const FractionalProblem& problem) {
  const int m = problem.free_count();
  const EigDecomposition eig = sym_eig(augmented_matrix(problem));
  const double root_beta = std::sqrt(problem.beta);
  for (int i = 0; i <= m; ++i) {
    const double last = eig.eigenvectors(m, i);
    if (std::abs(last) > 1e-12) {
      Eigen::VectorXd z = eig.eigenvectors.col(i).head(m) * (root_beta / last);
      return {std::move(z), eig.eigenvalues[i]};
    }
  }
  throw OracleDegenerateError(
      "oracle_fractional_min: no eigenvector extends to a finite minimizer");
}

GraphSignal assemble(const GraphSignal& x, const Eigen::VectorXi& mask,
                     const Eigen::VectorXd& z) {
  if (mask.size() != x.size()) {
    throw InvalidInputError("assemble: mask length does not match signal");
  }
  if (z.size() != mask.sum()) {
    throw InvalidInputError("assemble: z length does not match flagged count");
  }
  GraphSignal out = x;
  Eigen::Index next = 0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      out[i] = z[next++];
    }
  }
  return out;
}

RecoveryResult recover(const Laplacian& lap, const GraphSignal& x,
                       const Eigen::VectorXi& mask, const RecoveryConfig& cfg) {
  if (x.size() != lap.order() || mask.size() != lap.order()) {
    throw InvalidInputError("recover: dimension mismatch");
  }
  RecoveryResult res;
  res.fallback_used = cfg.fallback;
  if (mask.sum() == 0) {
    res.estimate = x;
    res.trace.converged = true;
    return res;
  }
  try {
    const FractionalProblem p = build_problem(lap, x, mask);
    DinkelbachTrace t = dinkelbach_solve(p, cfg);
    bool ok = t.converged;
    if (ok) {
      // A converged minimizer can still be unusable: when the flagged block
      // couples only weakly to the kept entries, the ratio is minimized by
      // huge fill-in values aligned with the block's softest mode.  Values
      // far outside the range of the kept entries cannot be a reconstruction
      // of a smooth signal, so treat that as a degenerate partition too.
      double kept_scale = 1.0;
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        if (!mask[i]) {
          kept_scale = std::max(kept_scale, std::abs(x[i]));
        }
      }
      if (t.final_z.size() > 0 &&
          t.final_z.cwiseAbs().maxCoeff() > 10.0 * kept_scale) {
        ok = false;
      }
    }
    if (ok) {
      res.estimate = assemble(x, mask, t.final_z);
    }
    res.trace = std::move(t);
    if (ok) {
      return res;
    }
  } catch (const DegeneratePartitionError&) {
  }
  res.used_fallback = true;
  if (cfg.fallback == FallbackPolicy::lowpass) {
    const GftBasis basis = GftBasis::from_laplacian(lap);
    const int bw = std::clamp(cfg.bw, 1, lap.order());
    res.estimate = lowpass_project(basis, bw, x);
  } else {
    res.estimate = x;
  }
  return res;
}

void write_trace(const DinkelbachTrace& trace, std::ostream& out) {
  char buf[96];
  out << "# outer gamma\n";
  for (std::size_t i = 0; i < trace.gammas.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %.17g", i, trace.gammas[i]);
    out << buf << '\n';
  }
  out << "# solve residual_norm iterations converged\n";
  for (std::size_t i = 0; i < trace.inner_reports.size(); ++i) {
    const SolveReport& r = trace.inner_reports[i];
    std::snprintf(buf, sizeof(buf), "%zu %.17g %d %d", i, r.residual_norm,
                  r.iterations, r.converged ? 1 : 0);
    out << buf << '\n';
  }
}

}  // namespace sgsr
