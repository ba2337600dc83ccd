#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>

#include "sgsr/harness.hpp"
#include "sgsr/random.hpp"

using namespace sgsr;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 12;
  cfg.trials = 5;
  cfg.snr_db_list = {10.0, 20.0};
  cfg.methods = {Method::attacked, Method::lpf, Method::median,
                 Method::proposed_basic, Method::oracle_mask};
  cfg.eta_policy = EtaPolicy::fixed;
  cfg.threshold_policy = ThresholdPolicy::fixed_sigma_a_sq;
  cfg.seed = 7;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("relative deviation and its decibel form") {
  GraphSignal truth(3);
  truth << 3.0, 0.0, 4.0;  // norm 5
  CHECK(msd(truth, truth) == 0.0);
  CHECK(msd_db(truth, truth) == -300.0);  // floored at exact recovery

  GraphSignal est = truth;
  est[0] += 5.0;  // error norm 5 -> ratio 1 -> 0 dB
  CHECK(msd(est, truth) == doctest::Approx(1.0));
  CHECK(msd_db(est, truth) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  est = truth * 1.1;  // ratio 0.1 -> -20 dB
  CHECK(msd(est, truth) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(msd_db(est, truth) == doctest::Approx(-20.0).epsilon(1e-9));

  CHECK_THROWS_AS(msd(truth, GraphSignal::Zero(3)), InvalidInputError);
  CHECK_THROWS_AS(msd(truth, GraphSignal::Zero(2)), InvalidInputError);
}

TEST_CASE("method names round trip") {
  for (Method m : all_methods()) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK(all_methods().size() == 7);
  CHECK_THROWS_AS(method_from_name("nonsense"), ConfigError);
}

TEST_CASE("config text parsing") {
  const ExperimentConfig defaults = load_config("");
  CHECK(defaults.n == 20);
  CHECK(defaults.p_link == 0.3);
  CHECK(defaults.sigma_a == 5.0);
  CHECK(defaults.trials == 1000);
  CHECK(defaults.eta == 0.8);
  CHECK(defaults.snr_db_list.size() == 7);

  const ExperimentConfig cfg = load_config(
      "# comment\n"
      "n = 15\n"
      "p_a = 0.1   # trailing comment\n"
      "snr_db_list = 5, 15\n"
      "methods = attacked, oracle_mask\n"
      "fallback = passthrough\n"
      "eta_policy = fixed\n"
      "threshold_policy = fixed_sigma_a_sq\n"
      "snr_convention = total_energy\n"
      "seed = 99\n");
  CHECK(cfg.n == 15);
  CHECK(cfg.p_a == 0.1);
  REQUIRE(cfg.snr_db_list.size() == 2);
  CHECK(cfg.snr_db_list[1] == 15.0);
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[1] == Method::oracle_mask);
  CHECK(cfg.fallback == FallbackPolicy::passthrough);
  CHECK(cfg.eta_policy == EtaPolicy::fixed);
  CHECK(cfg.threshold_policy == ThresholdPolicy::fixed_sigma_a_sq);
  CHECK(cfg.snr_convention == SnrConvention::total_energy);
  CHECK(cfg.seed == 99);
}

TEST_CASE("config errors carry line numbers and key names") {
  try {
    load_config("n = 15\nwhat is this\n");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.line() == 2);
  }
  try {
    load_config("n = x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.line() == 1);
  }
  try {
    load_config("banana = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("banana") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("trials = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("p_link = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("methods =\n"), ParseError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("detector operating point follows the config") {
  ExperimentConfig cfg;
  const DetectorParams p = cfg.detector_params(0.05);
  CHECK(p.sigma_sub == cfg.sigma_a);
  CHECK(p.threshold == doctest::Approx(cfg.sigma_a * cfg.sigma_a));
  CHECK(p.sigma_nu == 0.05);
  CHECK(p.eta_at(3) == cfg.eta);

  cfg.sigma_sub = 2.0;
  const DetectorParams q = cfg.detector_params(0.05);
  CHECK(q.sigma_sub == 2.0);
  CHECK(q.threshold == doctest::Approx(4.0));
}

TEST_CASE("trial evaluation is deterministic in the stream seed") {
  const ExperimentConfig cfg = small_config();
  RandomStream r1(derive_seed(cfg.seed, 1, 3));
  RandomStream r2(derive_seed(cfg.seed, 1, 3));
  const TrialRecord a = run_trial(cfg, 20.0, r1);
  const TrialRecord b = run_trial(cfg, 20.0, r2);
  REQUIRE(a.outcomes.size() == cfg.methods.size());
  for (const auto& [method, outcome] : a.outcomes) {
    const MethodOutcome& other = b.outcomes.at(method);
    CHECK(outcome.msd == other.msd);
    CHECK(outcome.msd_db == other.msd_db);
    CHECK(outcome.ok == other.ok);
  }
  CHECK(a.attacked_count == b.attacked_count);
  CHECK(a.basic_confusion.missed == b.basic_confusion.missed);
}

TEST_CASE("aggregated table is byte-identical across worker counts") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const MetricsTable t1 = run_experiment(cfg);
  cfg.threads = 4;
  const MetricsTable t4 = run_experiment(cfg);
  std::stringstream s1, s4;
  emit_csv(t1, s1);
  emit_csv(t4, s4);
  CHECK(s1.str() == s4.str());
}

TEST_CASE("metrics table layout and accessor") {
  const ExperimentConfig cfg = small_config();
  const MetricsTable t = run_experiment(cfg);
  CHECK(t.rows.size() == cfg.snr_db_list.size() * cfg.methods.size());
  const MetricsRow& row = t.at(20.0, Method::proposed_basic);
  CHECK(row.trials == cfg.trials);
  CHECK(std::isfinite(row.msd_db_mean));
  CHECK(std::isfinite(row.msd_db_stderr));
  CHECK(row.fallback_rate >= 0.0);
  // Methods that do not run a detector report no rates.
  CHECK(std::isnan(t.at(20.0, Method::attacked).p_md));
  CHECK(std::isnan(t.at(20.0, Method::lpf).p_fd));
  CHECK_THROWS_AS(t.at(12.5, Method::attacked), InvalidInputError);
}

TEST_CASE("table text round trip") {
  const ExperimentConfig cfg = small_config();
  const MetricsTable t = run_experiment(cfg);
  std::stringstream ss;
  emit_csv(t, ss);
  const MetricsTable back = read_csv(ss);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i].snr_db == t.rows[i].snr_db);
    CHECK(back.rows[i].method == t.rows[i].method);
    CHECK(back.rows[i].trials == t.rows[i].trials);
    CHECK(back.rows[i].msd_db_mean ==
          doctest::Approx(t.rows[i].msd_db_mean).epsilon(1e-9));
    if (std::isnan(t.rows[i].p_md)) {
      CHECK(std::isnan(back.rows[i].p_md));
    } else {
      CHECK(back.rows[i].p_md ==
            doctest::Approx(t.rows[i].p_md).scale(1.0).epsilon(1e-9));
    }
  }
  std::stringstream bad("wrong,header\n");
  CHECK_THROWS_AS(read_csv(bad), ParseError);
}

TEST_CASE("clean scenes recover the noise floor") {
  // No adversary and fixed detection: the raw observation sits at the
  // configured signal-to-noise ratio, here -20 dB of relative deviation.
  ExperimentConfig cfg = small_config();
  cfg.p_a = 0.0;
  cfg.trials = 40;
  cfg.snr_db_list = {20.0};
  cfg.methods = {Method::attacked, Method::proposed_basic};
  const MetricsTable t = run_experiment(cfg);
  const MetricsRow& raw = t.at(20.0, Method::attacked);
  CHECK(raw.msd_db_mean == doctest::Approx(-20.0).epsilon(0.05));
  // With nothing to detect the basic chain should rarely touch the signal.
  const MetricsRow& basic = t.at(20.0, Method::proposed_basic);
  CHECK(basic.msd_db_mean < -15.0);
}

TEST_CASE("regularization sweep pairs trials across the grid") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 4;
  cfg.snr_db_list = {20.0};
  const std::vector<double> grid = {0.4, 0.8};
  const EtaSweepTable sweep = sweep_eta(cfg, grid);
  REQUIRE(sweep.rows.size() == 2);
  CHECK(sweep.rows[0].eta == 0.4);
  CHECK(sweep.rows[1].eta == 0.8);
  for (const EtaSweepRow& row : sweep.rows) {
    CHECK(row.metrics.method == Method::proposed_basic);
    CHECK(row.metrics.snr_db == 20.0);
    CHECK(row.metrics.trials <= cfg.trials);
    CHECK(row.metrics.trials >= 1);
  }

  std::stringstream ss;
  emit_eta_csv(sweep, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "eta,snr_db,msd_db_mean,msd_db_stderr,trials,p_md,p_fd,fallback_rate");
  int lines = 0;
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty()) {
      ++lines;
    }
  }
  CHECK(lines == 2);
}

TEST_CASE("oracle access to the true mask beats the raw observation") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 30;
  cfg.snr_db_list = {20.0};
  cfg.methods = {Method::attacked, Method::oracle_mask};
  const MetricsTable t = run_experiment(cfg);
  CHECK(t.at(20.0, Method::oracle_mask).msd_db_mean <
        t.at(20.0, Method::attacked).msd_db_mean);
}
