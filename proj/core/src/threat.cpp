#include "sgsr/threat.hpp"

#include <cmath>

#include "sgsr/errors.hpp"

namespace sgsr {

double noise_sigma_for_snr(const GraphSignal& truth, double snr_db,
                           SnrConvention convention) {
  const double norm = truth.norm();
  if (norm == 0.0) {
    throw InvalidInputError("noise_sigma_for_snr: zero-norm truth signal");
  }
  const double signal_rms =
      convention == SnrConvention::per_node
          ? norm / std::sqrt(static_cast<double>(truth.size()))
          : norm;
  return signal_rms * std::pow(10.0, -snr_db / 20.0);
}

AttackScenario sample_attack(int n, double p_a, double sigma_a,
                             RandomStream& rng) {
  if (n < 0 || p_a < 0.0 || p_a > 1.0 || sigma_a <= 0.0) {
    throw InvalidInputError("sample_attack: need n >= 0, p_a in [0,1], sigma_a > 0");
  }
  AttackScenario sc;
  sc.p_a = p_a;
  sc.sigma_a = sigma_a;
  sc.mask.resize(n);
  sc.adversary_values.resize(n);
  for (int i = 0; i < n; ++i) {
    sc.mask[i] = rng.bernoulli(p_a) ? 1 : 0;
  }
  for (int i = 0; i < n; ++i) {
    sc.adversary_values[i] = rng.normal(0.0, sigma_a);
  }
  return sc;
}

Observation observe(const GraphSignal& truth, const AttackScenario& scenario,
                    double sigma_nu, RandomStream& rng) {
  const int n = static_cast<int>(truth.size());
  if (scenario.mask.size() != n || scenario.adversary_values.size() != n) {
    throw InvalidInputError("observe: scenario size does not match signal");
  }
  if (sigma_nu < 0.0) {
    throw InvalidInputError("observe: sigma_nu must be nonnegative");
  }
  Observation obs;
  obs.truth = truth;
  obs.scenario = scenario;
  obs.sigma_nu = sigma_nu;
  obs.observed.resize(n);
  for (int i = 0; i < n; ++i) {
    const double noisy = truth[i] + rng.normal(0.0, sigma_nu);
    obs.observed[i] = scenario.mask[i] ? scenario.adversary_values[i] : noisy;
  }
  return obs;
}

}  // namespace sgsr
