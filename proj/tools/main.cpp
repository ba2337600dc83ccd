// Command-line front end: benchmark runner, regularization sweep, and
// single-instance detect/recover/calibrate utilities over dumped graph and
// signal files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgsr/detector.hpp"
#include "sgsr/errors.hpp"
#include "sgsr/harness.hpp"
#include "sgsr/recovery.hpp"

namespace {

using sgsr::ExperimentConfig;

/// Optional per-flag overrides applied on top of the loaded (or default)
/// config, so flags always win over the config file.
struct Overrides {
  std::optional<int> n, bw, trials, max_outer, minres_max_iter, threads;
  std::optional<double> p_link, w_lo, w_hi, p_a, sigma_a, eta, epsilon,
      minres_tol, sigma_sub;
  std::optional<std::string> snr_db_list, methods, threshold_policy,
      eta_policy, fallback, snr_convention, graph_per_trial;
  std::optional<std::uint64_t> seed;
};

void add_override_flags(CLI::App& cmd, Overrides& ov) {
  cmd.add_option("--n", ov.n, "Node count");
  cmd.add_option("--p-link", ov.p_link, "Edge probability");
  cmd.add_option("--w-lo", ov.w_lo, "Minimum edge weight");
  cmd.add_option("--w-hi", ov.w_hi, "Maximum edge weight");
  cmd.add_option("--bw", ov.bw, "Signal bandwidth");
  cmd.add_option("--p-a", ov.p_a, "Per-node attack probability");
  cmd.add_option("--sigma-a", ov.sigma_a, "Adversary value std");
  cmd.add_option("--snr-db", ov.snr_db_list, "Comma-separated SNR grid (dB)");
  cmd.add_option("--trials", ov.trials, "Monte Carlo trials per SNR");
  cmd.add_option("--eta", ov.eta, "Detector regularization");
  cmd.add_option("--threshold-policy", ov.threshold_policy,
                 "fixed_sigma_a_sq | optimal");
  cmd.add_option("--eta-policy", ov.eta_policy, "fixed | optimal");
  cmd.add_option("--methods", ov.methods, "Comma-separated method list");
  cmd.add_option("--graph-per-trial", ov.graph_per_trial,
                 "true: fresh graph each trial; false: one shared graph");
  cmd.add_option("--fallback", ov.fallback, "lowpass | passthrough");
  cmd.add_option("--epsilon", ov.epsilon, "Ratio-iteration tolerance");
  cmd.add_option("--max-outer", ov.max_outer, "Outer iteration budget");
  cmd.add_option("--minres-tol", ov.minres_tol, "Inner solver tolerance");
  cmd.add_option("--minres-max-iter", ov.minres_max_iter,
                 "Inner iteration budget (0: 10x system size)");
  cmd.add_option("--sigma-sub", ov.sigma_sub,
                 "Modeled substitute std (0: use sigma_a)");
  cmd.add_option("--snr-convention", ov.snr_convention,
                 "per_node | total_energy");
  cmd.add_option("--threads", ov.threads, "Worker threads (0: hardware)");
}

/// Flags are re-expressed as config lines and run through the same parser so
/// value handling is identical in both paths.
ExperimentConfig resolve_config(const std::optional<std::string>& config_path,
                                const Overrides& ov,
                                std::optional<std::uint64_t> seed) {
  std::ostringstream text;
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) {
      throw sgsr::ConfigError("cannot open config file: " + *config_path);
    }
    text << in.rdbuf() << '\n';
  }
  const auto line = [&](const std::string& key, const auto& value) {
    text << key << " = " << value << '\n';
  };
  if (ov.n) line("n", *ov.n);
  if (ov.p_link) line("p_link", *ov.p_link);
  if (ov.w_lo) line("w_lo", *ov.w_lo);
  if (ov.w_hi) line("w_hi", *ov.w_hi);
  if (ov.bw) line("bw", *ov.bw);
  if (ov.p_a) line("p_a", *ov.p_a);
  if (ov.sigma_a) line("sigma_a", *ov.sigma_a);
  if (ov.snr_db_list) line("snr_db_list", *ov.snr_db_list);
  if (ov.trials) line("trials", *ov.trials);
  if (ov.eta) line("eta", *ov.eta);
  if (ov.threshold_policy) line("threshold_policy", *ov.threshold_policy);
  if (ov.eta_policy) line("eta_policy", *ov.eta_policy);
  if (ov.methods) line("methods", *ov.methods);
  if (ov.graph_per_trial) line("graph_per_trial", *ov.graph_per_trial);
  if (ov.fallback) line("fallback", *ov.fallback);
  if (ov.epsilon) line("epsilon", *ov.epsilon);
  if (ov.max_outer) line("max_outer", *ov.max_outer);
  if (ov.minres_tol) line("minres_tol", *ov.minres_tol);
  if (ov.minres_max_iter) line("minres_max_iter", *ov.minres_max_iter);
  if (ov.sigma_sub) line("sigma_sub", *ov.sigma_sub);
  if (ov.snr_convention) line("snr_convention", *ov.snr_convention);
  if (ov.threads) line("threads", *ov.threads);
  if (seed) line("seed", *seed);
  return sgsr::load_config(text.str());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw sgsr::ConfigError("cannot open output file: " + path);
  }
  return out;
}

void write_text(const std::optional<std::string>& out_path,
                const std::string& text) {
  if (out_path) {
    auto out = open_output(*out_path);
    out << text;
  } else {
    std::cout << text;
  }
}

sgsr::Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw sgsr::ConfigError("cannot open graph file: " + path);
  }
  return sgsr::read_edge_list(in);
}

sgsr::GraphSignal load_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw sgsr::ConfigError("cannot open signal file: " + path);
  }
  return sgsr::read_signal(in);
}

Eigen::VectorXi load_mask(const std::string& path) {
  const sgsr::GraphSignal raw = load_signal(path);
  Eigen::VectorXi mask(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (raw[i] != 0.0 && raw[i] != 1.0) {
      throw sgsr::ConfigError("mask file must contain only 0 or 1 entries");
    }
    mask[i] = static_cast<int>(raw[i]);
  }
  return mask;
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-signal recovery benchmark and adversary-detection tools"};
  app.require_subcommand(1);
  // Inherited by the subcommands added below, so app-level --config/--seed/
  // --out may appear after the verb as well.
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--seed", seed, "Base RNG seed");
  app.add_option("--out", out_path, "Output file (default: stdout)");

  Overrides ov;

  CLI::App* bench =
      app.add_subcommand("bench", "Run the Monte Carlo benchmark; emits CSV");
  add_override_flags(*bench, ov);

  CLI::App* sweep = app.add_subcommand(
      "sweep-eta", "Sweep the detector regularization; emits CSV");
  add_override_flags(*sweep, ov);
  std::string eta_grid_text = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,"
                              "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9";
  sweep->add_option("--eta-grid", eta_grid_text,
                    "Comma-separated regularization grid");

  std::string graph_path, signal_path, mask_path, trace_path;
  double cli_sigma_nu = 0.0;
  int cli_node = -1;

  CLI::App* detect_cmd = app.add_subcommand(
      "detect", "Per-node statistics and decisions for a dumped instance");
  detect_cmd->add_option("--graph", graph_path, "Edge-list file")->required();
  detect_cmd->add_option("--signal", signal_path, "Signal file")->required();
  detect_cmd->add_option("--sigma-nu", cli_sigma_nu,
                         "Noise std (> 0 adds closed-form error rates)");
  add_override_flags(*detect_cmd, ov);

  CLI::App* recover_cmd = app.add_subcommand(
      "recover", "Reconstruct a dumped instance from a 0/1 mask file");
  recover_cmd->add_option("--graph", graph_path, "Edge-list file")->required();
  recover_cmd->add_option("--signal", signal_path, "Signal file")->required();
  recover_cmd->add_option("--mask", mask_path, "Mask file (0/1 per line)")
      ->required();
  recover_cmd->add_option("--trace", trace_path, "Write the iteration trace");
  add_override_flags(*recover_cmd, ov);

  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Optimal threshold and regularization for one node");
  calibrate_cmd->add_option("--graph", graph_path, "Edge-list file")
      ->required();
  calibrate_cmd->add_option("--signal", signal_path, "Signal file")
      ->required();
  calibrate_cmd->add_option("--node", cli_node, "Node index")->required();
  calibrate_cmd->add_option("--sigma-nu", cli_sigma_nu, "Noise std")
      ->required();
  add_override_flags(*calibrate_cmd, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve_config(config_path, ov, seed);

    if (bench->parsed()) {
      const sgsr::MetricsTable table = sgsr::run_experiment(cfg);
      std::ostringstream csv;
      sgsr::emit_csv(table, csv);
      write_text(out_path, csv.str());
      return 0;
    }

    if (sweep->parsed()) {
      std::vector<double> grid;
      std::istringstream gs(eta_grid_text);
      std::string part;
      while (std::getline(gs, part, ',')) {
        grid.push_back(std::stod(part));
      }
      const sgsr::EtaSweepTable table = sgsr::sweep_eta(cfg, grid);
      std::ostringstream csv;
      sgsr::emit_eta_csv(table, csv);
      write_text(out_path, csv.str());
      return 0;
    }

    const sgsr::Graph g = load_graph(graph_path);
    const sgsr::Laplacian lap = sgsr::laplacian(g);
    const sgsr::GraphSignal x = load_signal(signal_path);

    if (detect_cmd->parsed()) {
      sgsr::DetectorParams params =
          cfg.detector_params(cli_sigma_nu > 0.0 ? cli_sigma_nu : 1.0);
      params.eta = Eigen::VectorXd::Constant(g.size(), cfg.eta);
      const sgsr::DetectionResult res = sgsr::detect(lap, x, params);
      std::ostringstream text;
      text << "# node statistic flagged";
      if (cli_sigma_nu > 0.0) {
        text << " p_md p_fd";
      }
      text << " (threshold = " << format17(params.threshold) << ")\n";
      for (int k = 0; k < g.size(); ++k) {
        text << k << ' ' << format17(res.statistics[k]) << ' '
             << res.estimated_mask[k];
        if (cli_sigma_nu > 0.0) {
          const sgsr::DetectorTerms terms =
              sgsr::analysis_terms(lap, x, k, params);
          const auto [p_md, p_fd] =
              sgsr::error_probabilities(terms, params.threshold);
          text << ' ' << format17(p_md) << ' ' << format17(p_fd);
        }
        text << '\n';
      }
      write_text(out_path, text.str());
      return 0;
    }

    if (recover_cmd->parsed()) {
      const Eigen::VectorXi mask = load_mask(mask_path);
      sgsr::RecoveryConfig rcfg = cfg.recovery_config();
      const sgsr::RecoveryResult res = sgsr::recover(lap, x, mask, rcfg);
      std::ostringstream text;
      for (Eigen::Index i = 0; i < res.estimate.size(); ++i) {
        text << format17(res.estimate[i]) << '\n';
      }
      write_text(out_path, text.str());
      if (!trace_path.empty()) {
        auto tout = open_output(trace_path);
        sgsr::write_trace(res.trace, tout);
      }
      if (res.used_fallback) {
        std::cerr << "note: recovery fell back ("
                  << (res.fallback_used == sgsr::FallbackPolicy::lowpass
                          ? "lowpass"
                          : "passthrough")
                  << ")\n";
      }
      return 0;
    }

    if (calibrate_cmd->parsed()) {
      sgsr::DetectorParams params = cfg.detector_params(cli_sigma_nu);
      params.eta = Eigen::VectorXd::Constant(g.size(), cfg.eta);
      const double eta_opt = sgsr::calibrate_eta(
          lap, x, cli_node, params, sgsr::ThresholdPolicy::optimal, 1e-8);
      sgsr::DetectorParams at_opt = params;
      at_opt.eta = Eigen::VectorXd::Constant(g.size(), eta_opt);
      const sgsr::DetectorTerms terms =
          sgsr::analysis_terms(lap, x, cli_node, at_opt);
      const auto [lo, hi] = sgsr::threshold_bracket(terms);
      const double th_opt = sgsr::calibrate_threshold(terms, lo, hi, 1e-8);
      const auto [p_md, p_fd] = sgsr::error_probabilities(terms, th_opt);
      std::ostringstream text;
      text << "node " << cli_node << '\n'
           << "eta_opt " << format17(eta_opt) << '\n'
           << "threshold_opt " << format17(th_opt) << '\n'
           << "p_md " << format17(p_md) << '\n'
           << "p_fd " << format17(p_fd) << '\n';
      write_text(out_path, text.str());
      return 0;
    }

    std::cerr << "error: no subcommand handled\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
