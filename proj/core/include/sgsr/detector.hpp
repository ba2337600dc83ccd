#pragma once

#include <Eigen/Core>

#include <utility>

#include "sgsr/graph.hpp"
#include "sgsr/signals.hpp"

namespace sgsr {

enum class ThresholdPolicy {
  fixed_sigma_a_sq,  // keep the caller-supplied threshold (sigma_a^2 by default)
  optimal,           // pick the threshold minimizing p_md + p_fd
};

enum class EtaPolicy {
  fixed,    // keep the caller-supplied regularization value
  optimal,  // per-node search minimizing p_md + p_fd
};

/// Detector configuration. `eta` holds one regularization value per node (a
/// single entry broadcasts to all nodes); every entry must satisfy
/// 0 < eta_k < 2*L_kk. `sigma_sub` is the modeled standard deviation of an
/// adversary-substituted value, bound to sigma_a by default.
struct DetectorParams {
  Eigen::VectorXd eta;
  double threshold = 0.0;
  double sigma_sub = 0.0;
  double sigma_a = 0.0;
  double sigma_nu = 0.0;

  /// Scalar eta broadcast to n nodes, sigma_sub = sigma_a and
  /// threshold = sigma_a^2 (the default operating point).
  static DetectorParams basic(int n, double eta_value, double sigma_a,
                              double sigma_nu);

  double eta_at(int k) const {
    return eta.size() == 1 ? eta[0] : eta[static_cast<Eigen::Index>(k)];
  }
};

/// Ingredients of the per-node statistic viewed as a quadratic in the node's
/// value: T = c*x_k^2 + d*x_k = c*(x_k + e)^2 + f, with c > 0 and f <= 0.
/// mu/sigma pairs describe the statistic's value distribution under the two
/// hypotheses: (mu_m, sigma_m) when the node is adversary-controlled,
/// (mu_f, sigma_f) when it is honest; x_star_est is the observed-mean
/// stand-in for the node's true value used by mu_f.
struct DetectorTerms {
  double a_k = 0.0;  // full inner product of the signal with Laplacian column k
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;
  double mu_m = 0.0;
  double mu_f = 0.0;
  double sigma_m = 0.0;
  double sigma_f = 0.0;
  double x_star_est = 0.0;
};

/// Per-node statistics plus the flag decisions. `thresholds` is empty when a
/// single scalar threshold was used (see `params.threshold`); per-node
/// calibration fills it with one threshold per node.
struct DetectionResult {
  Eigen::VectorXd statistics;
  Eigen::VectorXi estimated_mask;
  DetectorParams params;
  Eigen::VectorXd thresholds;
};

/// Differential-smoothness statistic for node k:
/// T = 2*a_k*x_k/eta_k - x_k^2 with a_k = x' L e_k over the full signal.
/// Throws CalibrationError unless 0 < eta_k < 2*L_kk.
double statistic(const Laplacian& lap, const GraphSignal& x, int k,
                 double eta_k);

/// Flags node k iff statistic(k) > params.threshold (strict).
DetectionResult detect(const Laplacian& lap, const GraphSignal& x,
                       const DetectorParams& params);

/// Quadratic-form view of the statistic at node k plus the two-hypothesis
/// moments used by the closed-form error probabilities.
DetectorTerms analysis_terms(const Laplacian& lap, const GraphSignal& x, int k,
                             const DetectorParams& params);

/// Closed-form (p_md, p_fd) for flagging on T > threshold. Requires
/// threshold > terms.f; at or below that floor the decision is "always flag"
/// (p_md = 0, p_fd = 1 limit) and ThresholdDomainError is thrown so the
/// caller can apply that limit explicitly. Results are clamped to [0, 1].
std::pair<double, double> error_probabilities(const DetectorTerms& terms,
                                              double threshold);

/// p_md + p_fd, with the always-flag limit (1.0) below the domain floor.
double error_objective(const DetectorTerms& terms, double threshold);

/// Search interval for threshold calibration: spans the degenerate
/// always-flag end to a point beyond which both hypotheses are fully
/// separated (8 standard deviations past each mean).
std::pair<double, double> threshold_bracket(const DetectorTerms& terms);

/// argmin of p_md + p_fd over threshold in [lo, hi] (derivative-free:
/// coarse scan plus local refinement). The caller's current operating point
/// sigma_m^2 is always evaluated when it lies in range, so the result is
/// never worse than it.
double calibrate_threshold(const DetectorTerms& terms, double lo, double hi,
                           double tol);

/// argmin of p_md + p_fd over eta_k in (1e-6, 2*L_kk - 1e-6), recomputing the
/// statistic's quadratic form per candidate. The threshold follows
/// threshold_policy: fixed keeps base.threshold, optimal nests
/// calibrate_threshold. base.eta_at(k) is always evaluated as a candidate,
/// so the result is never worse than the incoming value.
double calibrate_eta(const Laplacian& lap, const GraphSignal& x, int k,
                     const DetectorParams& base,
                     ThresholdPolicy threshold_policy, double tol);

/// Per-node detection with calibrated parameters per the two policies;
/// returns per-node thresholds in `thresholds` and the chosen eta values in
/// `params.eta`.
DetectionResult detect_calibrated(const Laplacian& lap, const GraphSignal& x,
                                  const DetectorParams& base,
                                  ThresholdPolicy threshold_policy,
                                  EtaPolicy eta_policy, double tol = 1e-6);

struct ConfusionCounts {
  int missed = 0;        // adversary nodes left unflagged
  int false_alarms = 0;  // honest nodes flagged
  int correct = 0;
};

ConfusionCounts detection_metrics(const Eigen::VectorXi& estimated,
                                  const Eigen::VectorXi& actual);

/// Exact derivative of p_md + p_fd with respect to the threshold (chain rule
/// through theta = sqrt((threshold - f)/c)); zero at interior optima.
double threshold_objective_derivative(const DetectorTerms& terms,
                                      double threshold);

/// Sensitivities of theta and mu_m to eta at fixed threshold. The *_alt
/// fields are alternative closed forms kept for diagnostic comparison only;
/// their algebra is unverified, so call sites must check them against finite
/// differences before relying on them (the plain fields are the derived and
/// finite-difference-validated ones).
struct EtaDerivatives {
  double dtheta_deta = 0.0;
  double dmu_m_deta = 0.0;
  double dtheta_deta_alt = 0.0;
  double dmu_m_deta_alt = 0.0;
};

EtaDerivatives eta_derivatives(const Laplacian& lap, const GraphSignal& x,
                               int k, const DetectorParams& params,
                               double threshold);

}  // namespace sgsr
