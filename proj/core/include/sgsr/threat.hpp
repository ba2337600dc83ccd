#pragma once

#include <Eigen/Core>

#include "sgsr/random.hpp"
#include "sgsr/signals.hpp"

namespace sgsr {

/// Which nodes lie about their value, and what they report. `adversary_values`
/// is drawn for every node; only entries under the mask are ever consumed.
struct AttackScenario {
  Eigen::VectorXi mask;             // 1 = adversary-controlled
  Eigen::VectorXd adversary_values; // zero-mean Gaussian, std sigma_a
  double p_a = 0.0;
  double sigma_a = 0.0;

  int attacked_count() const { return mask.sum(); }
};

/// One observed snapshot: honest nodes report truth + measurement noise,
/// masked nodes report their adversary value verbatim (and no noise).
struct Observation {
  GraphSignal truth;
  GraphSignal observed;
  AttackScenario scenario;
  double sigma_nu = 0.0;
};

enum class SnrConvention {
  per_node,      // SNR compares per-node signal power ||x||^2/n to sigma^2
  total_energy,  // SNR compares total energy ||x||^2 to sigma^2
};

/// Noise standard deviation that realizes the requested SNR in dB for the
/// given truth signal. Throws on a zero-norm truth.
double noise_sigma_for_snr(const GraphSignal& truth, double snr_db,
                           SnrConvention convention = SnrConvention::per_node);

/// Bernoulli(p_a) mask over n nodes plus N(0, sigma_a^2) adversary values.
/// Consumes n uniforms then n normals from the stream.
AttackScenario sample_attack(int n, double p_a, double sigma_a,
                             RandomStream& rng);

/// Applies the scenario to the truth under N(0, sigma_nu^2) measurement noise.
/// Noise is drawn for every node (n normals) and applied at honest nodes only.
Observation observe(const GraphSignal& truth, const AttackScenario& scenario,
                    double sigma_nu, RandomStream& rng);

}  // namespace sgsr
