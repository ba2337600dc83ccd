#include "sgsr/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sgsr/errors.hpp"
#include "sgsr/numerics.hpp"

namespace sgsr {

namespace {

void check_node(const Laplacian& lap, const GraphSignal& x, int k) {
  if (x.size() != lap.order()) {
    throw InvalidInputError("detector: signal length does not match Laplacian");
  }
  if (k < 0 || k >= lap.order()) {
    throw InvalidInputError("detector: node index out of range");
  }
}

double checked_eta(double eta_k, double l_kk, int k) {
  if (!(eta_k > 0.0) || !(eta_k < 2.0 * l_kk)) {
    std::ostringstream os;
    os << "detector: eta = " << eta_k << " at node " << k
       << " violates 0 < eta < 2*L_kk (L_kk = " << l_kk << ")";
    throw CalibrationError(os.str());
  }
  return eta_k;
}

double eta_for(const DetectorParams& params, int k, int n) {
  if (params.eta.size() != 1 && params.eta.size() != n) {
    throw InvalidInputError("detector: eta must be scalar or one value per node");
  }
  return params.eta_at(k);
}

/// Quadratic-form pieces at node k for a given eta; the moment fields are
/// filled by the caller when sigma information is available.
DetectorTerms base_terms(const Laplacian& lap, const GraphSignal& x, int k,
                         double eta_k) {
  const double l_kk = lap.matrix(k, k);
  checked_eta(eta_k, l_kk, k);
  DetectorTerms t;
  t.a_k = x.dot(lap.matrix.dense().col(k));
  t.c = 2.0 * l_kk / eta_k - 1.0;
  t.d = 2.0 * (t.a_k - x[k] * l_kk) / eta_k;
  t.e = t.d / (2.0 * t.c);
  t.f = -t.c * t.e * t.e;
  t.x_star_est = x.mean();
  return t;
}

double theta_from(const DetectorTerms& terms, double threshold) {
  if (!(threshold > terms.f)) {
    std::ostringstream os;
    os << "detector: threshold " << threshold
       << " is at or below the statistic floor " << terms.f
       << "; the decision degenerates to always-flag (p_md = 0, p_fd = 1)";
    throw ThresholdDomainError(os.str());
  }
  return std::sqrt((threshold - terms.f) / terms.c);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

DetectorParams DetectorParams::basic(int n, double eta_value, double sigma_a,
                                     double sigma_nu) {
  DetectorParams p;
  p.eta = Eigen::VectorXd::Constant(n, eta_value);
  p.sigma_a = sigma_a;
  p.sigma_nu = sigma_nu;
  p.sigma_sub = sigma_a;
  p.threshold = sigma_a * sigma_a;
  return p;
}

double statistic(const Laplacian& lap, const GraphSignal& x, int k,
                 double eta_k) {
  check_node(lap, x, k);
  checked_eta(eta_k, lap.matrix(k, k), k);
  const double a_k = x.dot(lap.matrix.dense().col(k));
  return 2.0 * a_k * x[k] / eta_k - x[k] * x[k];
}

DetectionResult detect(const Laplacian& lap, const GraphSignal& x,
                       const DetectorParams& params) {
  const int n = lap.order();
  DetectionResult res;
  res.params = params;
  res.statistics.resize(n);
  res.estimated_mask.resize(n);
  for (int k = 0; k < n; ++k) {
    res.statistics[k] = statistic(lap, x, k, eta_for(params, k, n));
    res.estimated_mask[k] = res.statistics[k] > params.threshold ? 1 : 0;
  }
  return res;
}

DetectorTerms analysis_terms(const Laplacian& lap, const GraphSignal& x, int k,
                             const DetectorParams& params) {
  check_node(lap, x, k);
  if (!(params.sigma_sub > 0.0) || !(params.sigma_nu > 0.0)) {
    throw InvalidInputError("detector: analysis needs sigma_sub > 0 and sigma_nu > 0");
  }
  DetectorTerms t = base_terms(lap, x, k, eta_for(params, k, lap.order()));
  t.mu_m = t.e;
  t.mu_f = t.e + t.x_star_est;
  t.sigma_m = params.sigma_sub;
  t.sigma_f = params.sigma_nu;
  return t;
}

std::pair<double, double> error_probabilities(const DetectorTerms& terms,
                                              double threshold) {
  if (!(terms.c > 0.0)) {
    throw InvalidInputError("error_probabilities: terms require c > 0");
  }
  const double theta = theta_from(terms, threshold);
  const double p_md =
      1.0 - gaussian_q((theta + terms.mu_m) / terms.sigma_m) -
      gaussian_q((theta - terms.mu_m) / terms.sigma_m);
  const double p_fd = gaussian_q((theta + terms.mu_f) / terms.sigma_f) +
                      gaussian_q((theta - terms.mu_f) / terms.sigma_f);
  return {clamp01(p_md), clamp01(p_fd)};
}

double error_objective(const DetectorTerms& terms, double threshold) {
  try {
    const auto [p_md, p_fd] = error_probabilities(terms, threshold);
    return p_md + p_fd;
  } catch (const ThresholdDomainError&) {
    return 1.0;  // always-flag limit: p_md = 0, p_fd = 1
  }
}

std::pair<double, double> threshold_bracket(const DetectorTerms& terms) {
  const double theta_hi =
      std::max({std::abs(terms.mu_m) + 8.0 * terms.sigma_m,
                std::abs(terms.mu_f) + 8.0 * terms.sigma_f, 1.0});
  const double theta_lo = 1e-6 * theta_hi;
  return {terms.f + terms.c * theta_lo * theta_lo,
          terms.f + terms.c * theta_hi * theta_hi};
}

double calibrate_threshold(const DetectorTerms& terms, double lo, double hi,
                           double tol) {
  if (!(lo > terms.f)) {
    throw CalibrationError("calibrate_threshold: lo must exceed the floor f");
  }
  if (!(lo < hi)) {
    throw CalibrationError("calibrate_threshold: need lo < hi");
  }
  const auto objective = [&](double th) { return error_objective(terms, th); };

  // Scan uniformly in theta, where the objective's features have native
  // scale, then polish the best bracket in threshold units.
  const double theta_lo = std::sqrt((lo - terms.f) / terms.c);
  const double theta_hi = std::sqrt((hi - terms.f) / terms.c);
  const int grid = 257;
  double best_th = lo;
  double best_val = objective(lo);
  int best_idx = 0;
  for (int i = 0; i < grid; ++i) {
    const double theta =
        theta_lo + (theta_hi - theta_lo) * i / static_cast<double>(grid - 1);
    const double th = terms.f + terms.c * theta * theta;
    const double val = objective(th);
    if (val < best_val) {
      best_val = val;
      best_th = th;
      best_idx = i;
    }
  }
  const auto theta_at = [&](int i) {
    return theta_lo + (theta_hi - theta_lo) *
                          std::clamp(i, 0, grid - 1) /
                          static_cast<double>(grid - 1);
  };
  const double refine_lo = terms.f + terms.c * theta_at(best_idx - 1) *
                                         theta_at(best_idx - 1);
  const double refine_hi = terms.f + terms.c * theta_at(best_idx + 1) *
                                         theta_at(best_idx + 1);
  const ScalarMinimum refined =
      minimize_scalar(objective, refine_lo, refine_hi, tol, 200);
  if (refined.f_min < best_val) {
    best_val = refined.f_min;
    best_th = refined.x_min;
  }
  // The default operating point stays a candidate whenever it is in range, so
  // calibration never regresses from it.
  const double incumbent = terms.sigma_m * terms.sigma_m;
  if (incumbent >= lo && incumbent <= hi && objective(incumbent) < best_val) {
    best_th = incumbent;
  }
  return best_th;
}

namespace {

double eta_objective(const Laplacian& lap, const GraphSignal& x, int k,
                     const DetectorParams& base, ThresholdPolicy policy,
                     double tol, double eta_k) {
  DetectorTerms t = base_terms(lap, x, k, eta_k);
  t.mu_m = t.e;
  t.mu_f = t.e + t.x_star_est;
  t.sigma_m = base.sigma_sub;
  t.sigma_f = base.sigma_nu;
  double th = base.threshold;
  if (policy == ThresholdPolicy::optimal) {
    const auto [lo, hi] = threshold_bracket(t);
    th = calibrate_threshold(t, lo, hi, tol);
  }
  return error_objective(t, th);
}

}  // namespace

double calibrate_eta(const Laplacian& lap, const GraphSignal& x, int k,
                     const DetectorParams& base,
                     ThresholdPolicy threshold_policy, double tol) {
  check_node(lap, x, k);
  if (!(base.sigma_sub > 0.0) || !(base.sigma_nu > 0.0)) {
    throw InvalidInputError("calibrate_eta: needs sigma_sub > 0 and sigma_nu > 0");
  }
  const double margin = 1e-6;
  const double lo = margin;
  const double hi = 2.0 * lap.matrix(k, k) - margin;
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "calibrate_eta: empty search interval at node " << k
       << " (L_kk = " << lap.matrix(k, k) << ")";
    throw CalibrationError(os.str());
  }
  const auto objective = [&](double eta_k) {
    return eta_objective(lap, x, k, base, threshold_policy, tol, eta_k);
  };

  const int grid = 41;
  double best_eta = lo;
  double best_val = objective(lo);
  int best_idx = 0;
  for (int i = 0; i < grid; ++i) {
    const double eta_k =
        lo + (hi - lo) * i / static_cast<double>(grid - 1);
    const double val = objective(eta_k);
    if (val < best_val) {
      best_val = val;
      best_eta = eta_k;
      best_idx = i;
    }
  }
  const auto eta_at = [&](int i) {
    return lo + (hi - lo) * std::clamp(i, 0, grid - 1) /
                    static_cast<double>(grid - 1);
  };
  const ScalarMinimum refined = minimize_scalar(
      objective, eta_at(best_idx - 1), eta_at(best_idx + 1), tol, 200);
  if (refined.f_min < best_val) {
    best_val = refined.f_min;
    best_eta = refined.x_min;
  }
  const double incumbent = base.eta_at(k);
  if (incumbent > lo && incumbent < hi && objective(incumbent) < best_val) {
    best_eta = incumbent;
  }
  return best_eta;
}

DetectionResult detect_calibrated(const Laplacian& lap, const GraphSignal& x,
                                  const DetectorParams& base,
                                  ThresholdPolicy threshold_policy,
                                  EtaPolicy eta_policy, double tol) {
  const int n = lap.order();
  DetectionResult res;
  res.params = base;
  res.params.eta.resize(n);
  res.statistics.resize(n);
  res.estimated_mask.resize(n);
  res.thresholds.resize(n);
  for (int k = 0; k < n; ++k) {
    const double eta_k =
        eta_policy == EtaPolicy::optimal
            ? calibrate_eta(lap, x, k, base, threshold_policy, tol)
            : eta_for(base, k, n);
    double th = base.threshold;
    if (threshold_policy == ThresholdPolicy::optimal) {
      DetectorParams at_eta = base;
      at_eta.eta = Eigen::VectorXd::Constant(1, eta_k);
      const DetectorTerms terms = analysis_terms(lap, x, k, at_eta);
      const auto [lo, hi] = threshold_bracket(terms);
      th = calibrate_threshold(terms, lo, hi, tol);
    }
    res.params.eta[k] = eta_k;
    res.thresholds[k] = th;
    res.statistics[k] = statistic(lap, x, k, eta_k);
    res.estimated_mask[k] = res.statistics[k] > th ? 1 : 0;
  }
  return res;
}

ConfusionCounts detection_metrics(const Eigen::VectorXi& estimated,
                                  const Eigen::VectorXi& actual) {
  if (estimated.size() != actual.size()) {
    throw InvalidInputError("detection_metrics: mask lengths differ");
  }
  ConfusionCounts counts;
  for (Eigen::Index i = 0; i < estimated.size(); ++i) {
    if (actual[i] == 1 && estimated[i] == 0) {
      ++counts.missed;
    } else if (actual[i] == 0 && estimated[i] == 1) {
      ++counts.false_alarms;
    } else {
      ++counts.correct;
    }
  }
  return counts;
}

double threshold_objective_derivative(const DetectorTerms& terms,
                                      double threshold) {
  const double theta = theta_from(terms, threshold);
  if (theta == 0.0) {
    throw ThresholdDomainError(
        "threshold_objective_derivative: derivative undefined at theta = 0");
  }
  const double dpmd_dtheta =
      (gaussian_pdf((theta + terms.mu_m) / terms.sigma_m) +
       gaussian_pdf((theta - terms.mu_m) / terms.sigma_m)) /
      terms.sigma_m;
  const double dpfd_dtheta =
      -(gaussian_pdf((theta + terms.mu_f) / terms.sigma_f) +
        gaussian_pdf((theta - terms.mu_f) / terms.sigma_f)) /
      terms.sigma_f;
  const double dtheta_dth = 1.0 / (2.0 * terms.c * theta);
  return dtheta_dth * (dpmd_dtheta + dpfd_dtheta);
}

EtaDerivatives eta_derivatives(const Laplacian& lap, const GraphSignal& x,
                               int k, const DetectorParams& params,
                               double threshold) {
  const DetectorTerms t = analysis_terms(lap, x, k, params);
  const double eta_k = eta_for(params, k, lap.order());
  const double theta = theta_from(t, threshold);
  if (theta == 0.0) {
    throw ThresholdDomainError("eta_derivatives: undefined at theta = 0");
  }
  EtaDerivatives out;
  // theta^2 = threshold/c + e^2 with dc/deta = -(c+1)/eta, de/deta = e/(c*eta).
  out.dtheta_deta =
      (2.0 * threshold * t.c * (t.c + 1.0) + t.d * t.d) /
      (4.0 * eta_k * t.c * t.c * t.c * theta);
  out.dmu_m_deta = t.e / (t.c * eta_k);
  out.dtheta_deta_alt =
      (2.0 * t.c * (t.c + 1.0) * threshold - t.d * t.d) /
      (eta_k * t.c * t.c * t.c * theta);
  out.dmu_m_deta_alt = eta_k * t.mu_m / t.c;
  return out;
}

}  // namespace sgsr
