#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sgsr/detector.hpp"
#include "sgsr/recovery.hpp"
#include "sgsr/threat.hpp"

namespace sgsr {

enum class Method {
  attacked,           // observation reported as-is
  lpf,                // spectral low-pass projection of the observation
  median,             // neighborhood median filter
  proposed_basic,     // detect at (eta, sigma_a^2), then ratio recovery
  proposed_opt,       // detect with calibrated eta/threshold, then recovery
  proposed_plus_lpf,  // low-pass applied on top of proposed_basic
  oracle_mask,        // recovery from the true adversary mask
};

/// Canonical listing used for stable row ordering.
const std::vector<Method>& all_methods();
const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws ConfigError

/// Flat experiment configuration; defaults reproduce the reference benchmark
/// setup (20-node random graphs, bandwidth 2, p_a = 0.2, sigma_a = 5,
/// SNR 0..30 dB, 1000 trials).
struct ExperimentConfig {
  int n = 20;
  double p_link = 0.3;
  double w_lo = 0.5;
  double w_hi = 1.0;
  int bw = 2;
  double p_a = 0.2;
  double sigma_a = 5.0;
  std::vector<double> snr_db_list = {0, 5, 10, 15, 20, 25, 30};
  int trials = 1000;
  std::uint64_t seed = 1;
  double eta = 0.8;
  ThresholdPolicy threshold_policy = ThresholdPolicy::optimal;
  EtaPolicy eta_policy = EtaPolicy::optimal;
  std::vector<Method> methods = {
      Method::attacked,       Method::lpf,
      Method::median,         Method::proposed_basic,
      Method::proposed_plus_lpf, Method::oracle_mask};
  bool graph_per_trial = true;
  FallbackPolicy fallback = FallbackPolicy::lowpass;
  double epsilon = 1e-9;
  int max_outer = 100;
  double minres_tol = 1e-10;
  int minres_max_iter = 0;    // <= 0: 10x system size
  double sigma_sub = 0.0;     // 0: bind to sigma_a
  SnrConvention snr_convention = SnrConvention::per_node;
  int threads = 0;            // 0: hardware concurrency

  void validate() const;  // throws ConfigError on any violated constraint
  RecoveryConfig recovery_config() const;
  /// Detector operating point for the given noise level: sigma_sub binding
  /// and threshold = sigma_sub^2 (sigma_a^2 unless overridden).
  DetectorParams detector_params(double sigma_nu) const;
};

struct MethodOutcome {
  double msd = 0.0;
  double msd_db = 0.0;
  bool ok = false;
  bool used_fallback = false;
};

struct TrialRecord {
  double snr_db = 0.0;
  int trial_index = 0;
  std::uint64_t stream_seed = 0;
  std::map<Method, MethodOutcome> outcomes;
  ConfusionCounts basic_confusion;  // detection at the basic operating point
  ConfusionCounts opt_confusion;    // detection with calibrated parameters
  bool basic_detection_ok = false;
  bool opt_detection_ok = false;
  int attacked_count = 0;
};

/// One aggregated cell. p_md/p_fd are empirical detection rates over the
/// attacked/honest node populations (NaN for methods that do not detect);
/// fallback_rate is the fraction of trials whose recovery fell back (NaN for
/// methods that do not recover).
struct MetricsRow {
  double snr_db = 0.0;
  Method method = Method::attacked;
  double msd_db_mean = 0.0;
  double msd_db_stderr = 0.0;
  int trials = 0;
  double p_md = 0.0;
  double p_fd = 0.0;
  double fallback_rate = 0.0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  const MetricsRow& at(double snr_db, Method method) const;
};

/// Relative deviation ||estimate - truth|| / ||truth||; throws on zero-norm
/// truth.
double msd(const GraphSignal& estimate, const GraphSignal& truth);

/// 20*log10(msd), floored at -300 dB so exact recoveries stay finite.
double msd_db(const GraphSignal& estimate, const GraphSignal& truth);

/// One Monte Carlo realization at the given SNR. Draws (in order) the graph
/// unless one is shared, the bandlimited truth, the attack, and the noise
/// from `rng`, then evaluates every configured method. A method that throws
/// records ok = false and the trial continues.
TrialRecord run_trial(const ExperimentConfig& cfg, double snr_db,
                      RandomStream& rng, const Graph* shared_graph = nullptr);

/// Full benchmark: per-(snr, trial) streams derived from (seed, snr index + 1,
/// trial index), trials run on cfg.threads workers, aggregation in fixed
/// trial order so the result is byte-identical across worker counts.
MetricsTable run_experiment(const ExperimentConfig& cfg);

/// Flat "key = value" config text; '#' starts a comment. Unknown keys are an
/// error listing them; malformed lines report their line number. Missing keys
/// keep their defaults; the result is validated before being returned.
ExperimentConfig load_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// CSV with header snr_db,method,msd_db_mean,msd_db_stderr,trials,p_md,p_fd,
/// fallback_rate; 10 significant digits.
void emit_csv(const MetricsTable& table, std::ostream& out);
MetricsTable read_csv(std::istream& in);

/// Regularization sweep: reruns the experiment with methods fixed to
/// proposed_basic for each eta in the grid, sharing the base seed so trials
/// are paired across eta values.
struct EtaSweepRow {
  double eta = 0.0;
  MetricsRow metrics;
};

struct EtaSweepTable {
  std::vector<EtaSweepRow> rows;
};

EtaSweepTable sweep_eta(const ExperimentConfig& base,
                        const std::vector<double>& eta_grid);

/// CSV with header eta,snr_db,msd_db_mean,msd_db_stderr,trials,p_md,p_fd,
/// fallback_rate; 10 significant digits.
void emit_eta_csv(const EtaSweepTable& table, std::ostream& out);

}  // namespace sgsr
