#include "sgsr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "sgsr/errors.hpp"

namespace sgsr {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kDbFloor = -300.0;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string::size_type pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) {
      break;
    }
    pos = next + 1;
  }
  return parts;
}

std::string format_g10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::attacked,       Method::lpf,
      Method::median,         Method::proposed_basic,
      Method::proposed_opt,   Method::proposed_plus_lpf,
      Method::oracle_mask};
  return methods;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::attacked: return "attacked";
    case Method::lpf: return "lpf";
    case Method::median: return "median";
    case Method::proposed_basic: return "proposed_basic";
    case Method::proposed_opt: return "proposed_opt";
    case Method::proposed_plus_lpf: return "proposed_plus_lpf";
    case Method::oracle_mask: return "oracle_mask";
  }
  throw InvalidInputError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  for (Method m : all_methods()) {
    if (name == method_name(m)) {
      return m;
    }
  }
  throw ConfigError("unknown method name: " + name);
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) {
      problems.push_back(what);
    }
  };
  need(n >= 2, "n must be at least 2");
  need(p_link > 0.0 && p_link <= 1.0, "p_link must be in (0, 1]");
  need(w_lo > 0.0 && w_lo <= w_hi, "need 0 < w_lo <= w_hi");
  need(bw >= 1 && bw <= n, "bw must be in [1, n]");
  need(p_a >= 0.0 && p_a <= 1.0, "p_a must be in [0, 1]");
  need(sigma_a > 0.0, "sigma_a must be positive");
  need(!snr_db_list.empty(), "snr_db_list must be non-empty");
  need(trials >= 1, "trials must be at least 1");
  need(eta > 0.0, "eta must be positive");
  need(!methods.empty(), "methods must be non-empty");
  need(epsilon > 0.0, "epsilon must be positive");
  need(max_outer >= 1, "max_outer must be at least 1");
  need(minres_tol > 0.0, "minres_tol must be positive");
  need(sigma_sub >= 0.0, "sigma_sub must be nonnegative");
  need(threads >= 0, "threads must be nonnegative");
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) {
      msg += " " + p + ";";
    }
    throw ConfigError(msg);
  }
}

RecoveryConfig ExperimentConfig::recovery_config() const {
  RecoveryConfig r;
  r.epsilon = epsilon;
  r.max_outer = max_outer;
  r.minres_tol = minres_tol;
  r.minres_max_iter = minres_max_iter;
  r.fallback = fallback;
  r.bw = bw;
  return r;
}

DetectorParams ExperimentConfig::detector_params(double sigma_nu) const {
  const double sub = sigma_sub > 0.0 ? sigma_sub : sigma_a;
  DetectorParams p = DetectorParams::basic(n, eta, sigma_a, sigma_nu);
  p.sigma_sub = sub;
  p.threshold = sub * sub;
  return p;
}

const MetricsRow& MetricsTable::at(double snr_db, Method method) const {
  for (const MetricsRow& row : rows) {
    if (row.method == method && row.snr_db == snr_db) {
      return row;
    }
  }
  throw InvalidInputError("MetricsTable::at: no such (snr, method) cell");
}

double msd(const GraphSignal& estimate, const GraphSignal& truth) {
  if (truth.norm() == 0.0) {
    throw InvalidInputError("msd: zero-norm truth");
  }
  if (estimate.size() != truth.size()) {
    throw InvalidInputError("msd: dimension mismatch");
  }
  return (estimate - truth).norm() / truth.norm();
}

double msd_db(const GraphSignal& estimate, const GraphSignal& truth) {
  const double value = msd(estimate, truth);
  if (value == 0.0) {
    return kDbFloor;
  }
  return std::max(20.0 * std::log10(value), kDbFloor);
}

TrialRecord run_trial(const ExperimentConfig& cfg, double snr_db,
                      RandomStream& rng, const Graph* shared_graph) {
  TrialRecord rec;
  rec.snr_db = snr_db;

  std::optional<Graph> own;
  if (shared_graph == nullptr) {
    own = erdos_renyi(cfg.n, cfg.p_link, cfg.w_lo, cfg.w_hi, rng);
  }
  const Graph& g = shared_graph ? *shared_graph : *own;
  const Laplacian lap = laplacian(g);
  const GftBasis basis = GftBasis::from_laplacian(lap);
  const GraphSignal truth = synth_bandlimited(basis, cfg.bw, rng);
  const double sigma_nu =
      noise_sigma_for_snr(truth, snr_db, cfg.snr_convention);
  const AttackScenario scenario =
      sample_attack(cfg.n, cfg.p_a, cfg.sigma_a, rng);
  const Observation obs = observe(truth, scenario, sigma_nu, rng);
  rec.attacked_count = scenario.attacked_count();

  const RecoveryConfig rcfg = cfg.recovery_config();
  const auto wants = [&](Method m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
           cfg.methods.end();
  };
  const auto record = [&](Method m, const GraphSignal& est, bool fell_back) {
    MethodOutcome& out = rec.outcomes[m];
    out.msd = msd(est, truth);
    out.msd_db = msd_db(est, truth);
    out.used_fallback = fell_back;
    out.ok = true;
  };
  const auto record_failure = [&](Method m) { rec.outcomes[m].ok = false; };

  if (wants(Method::attacked)) {
    record(Method::attacked, obs.observed, false);
  }
  if (wants(Method::lpf)) {
    record(Method::lpf, lowpass_project(basis, cfg.bw, obs.observed), false);
  }
  if (wants(Method::median)) {
    record(Method::median, median_filter(g, obs.observed), false);
  }

  if (wants(Method::proposed_basic) || wants(Method::proposed_plus_lpf)) {
    try {
      const DetectorParams params = cfg.detector_params(sigma_nu);
      const DetectionResult det = detect(lap, obs.observed, params);
      rec.basic_confusion =
          detection_metrics(det.estimated_mask, scenario.mask);
      rec.basic_detection_ok = true;
      const RecoveryResult r =
          recover(lap, obs.observed, det.estimated_mask, rcfg);
      if (wants(Method::proposed_basic)) {
        record(Method::proposed_basic, r.estimate, r.used_fallback);
      }
      if (wants(Method::proposed_plus_lpf)) {
        record(Method::proposed_plus_lpf,
               lowpass_project(basis, cfg.bw, r.estimate), r.used_fallback);
      }
    } catch (const std::exception&) {
      if (wants(Method::proposed_basic)) {
        record_failure(Method::proposed_basic);
      }
      if (wants(Method::proposed_plus_lpf)) {
        record_failure(Method::proposed_plus_lpf);
      }
    }
  }

  if (wants(Method::proposed_opt)) {
    try {
      const DetectorParams params = cfg.detector_params(sigma_nu);
      const DetectionResult det = detect_calibrated(
          lap, obs.observed, params, cfg.threshold_policy, cfg.eta_policy);
      rec.opt_confusion = detection_metrics(det.estimated_mask, scenario.mask);
      rec.opt_detection_ok = true;
      const RecoveryResult r =
          recover(lap, obs.observed, det.estimated_mask, rcfg);
      record(Method::proposed_opt, r.estimate, r.used_fallback);
    } catch (const std::exception&) {
      record_failure(Method::proposed_opt);
    }
  }

  if (wants(Method::oracle_mask)) {
    try {
      const RecoveryResult r = recover(lap, obs.observed, scenario.mask, rcfg);
      record(Method::oracle_mask, r.estimate, r.used_fallback);
    } catch (const std::exception&) {
      record_failure(Method::oracle_mask);
    }
  }
  return rec;
}

namespace {

bool method_detects(Method m) {
  return m == Method::proposed_basic || m == Method::proposed_opt ||
         m == Method::proposed_plus_lpf || m == Method::oracle_mask;
}

bool method_recovers(Method m) { return method_detects(m); }

MetricsRow aggregate_cell(const ExperimentConfig& cfg, double snr_db,
                          Method method,
                          const std::vector<TrialRecord>& records) {
  MetricsRow row;
  row.snr_db = snr_db;
  row.method = method;
  std::vector<double> dbs;
  dbs.reserve(records.size());
  long fallbacks = 0;
  long missed = 0;
  long false_alarms = 0;
  long attacked_total = 0;
  long honest_total = 0;
  bool any_rates = false;
  for (const TrialRecord& rec : records) {
    const auto it = rec.outcomes.find(method);
    if (it == rec.outcomes.end() || !it->second.ok) {
      continue;
    }
    dbs.push_back(it->second.msd_db);
    if (it->second.used_fallback) {
      ++fallbacks;
    }
    const bool use_opt = method == Method::proposed_opt;
    const bool detection_ok =
        use_opt ? rec.opt_detection_ok : rec.basic_detection_ok;
    if (method_detects(method)) {
      if (method == Method::oracle_mask) {
        attacked_total += rec.attacked_count;
        honest_total += cfg.n - rec.attacked_count;
        any_rates = true;
      } else if (detection_ok) {
        const ConfusionCounts& counts =
            use_opt ? rec.opt_confusion : rec.basic_confusion;
        missed += counts.missed;
        false_alarms += counts.false_alarms;
        attacked_total += rec.attacked_count;
        honest_total += cfg.n - rec.attacked_count;
        any_rates = true;
      }
    }
  }
  row.trials = static_cast<int>(dbs.size());
  if (dbs.empty()) {
    row.msd_db_mean = kNan;
    row.msd_db_stderr = kNan;
  } else {
    double sum = 0.0;
    for (double v : dbs) {
      sum += v;
    }
    row.msd_db_mean = sum / static_cast<double>(dbs.size());
    double sq = 0.0;
    for (double v : dbs) {
      sq += (v - row.msd_db_mean) * (v - row.msd_db_mean);
    }
    row.msd_db_stderr =
        dbs.size() > 1
            ? std::sqrt(sq / static_cast<double>(dbs.size() - 1)) /
                  std::sqrt(static_cast<double>(dbs.size()))
            : 0.0;
  }
  if (method_detects(method) && any_rates) {
    row.p_md = attacked_total > 0
                   ? static_cast<double>(missed) /
                         static_cast<double>(attacked_total)
                   : kNan;
    row.p_fd = honest_total > 0 ? static_cast<double>(false_alarms) /
                                      static_cast<double>(honest_total)
                                : kNan;
  } else {
    row.p_md = kNan;
    row.p_fd = kNan;
  }
  row.fallback_rate =
      method_recovers(method) && !dbs.empty()
          ? static_cast<double>(fallbacks) / static_cast<double>(dbs.size())
          : kNan;
  return row;
}

}  // namespace

MetricsTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<Graph> shared;
  if (!cfg.graph_per_trial) {
    RandomStream graph_rng(derive_seed(cfg.seed, 0, 0));
    shared = erdos_renyi(cfg.n, cfg.p_link, cfg.w_lo, cfg.w_hi, graph_rng);
  }
  const Graph* shared_ptr = shared ? &*shared : nullptr;

  const std::size_t snr_count = cfg.snr_db_list.size();
  const std::size_t total =
      snr_count * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialRecord> records(total);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) {
        return;
      }
      const std::size_t si = idx / static_cast<std::size_t>(cfg.trials);
      const std::size_t ti = idx % static_cast<std::size_t>(cfg.trials);
      try {
        RandomStream rng(derive_seed(cfg.seed, si + 1, ti));
        TrialRecord rec =
            run_trial(cfg, cfg.snr_db_list[si], rng, shared_ptr);
        rec.trial_index = static_cast<int>(ti);
        rec.stream_seed = derive_seed(cfg.seed, si + 1, ti);
        records[idx] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
        return;
      }
    }
  };

  unsigned worker_count =
      cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                      : std::max(1u, std::thread::hardware_concurrency());
  worker_count = std::min<unsigned>(
      worker_count, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (unsigned i = 0; i < worker_count; ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }

  MetricsTable table;
  for (std::size_t si = 0; si < snr_count; ++si) {
    const auto begin =
        records.begin() + static_cast<std::ptrdiff_t>(si * cfg.trials);
    const std::vector<TrialRecord> cell(begin, begin + cfg.trials);
    for (Method m : all_methods()) {
      if (std::find(cfg.methods.begin(), cfg.methods.end(), m) ==
          cfg.methods.end()) {
        continue;
      }
      table.rows.push_back(
          aggregate_cell(cfg, cfg.snr_db_list[si], m, cell));
    }
  }
  return table;
}

namespace {

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") {
    return true;
  }
  if (v == "false" || v == "0") {
    return false;
  }
  throw ParseError(line, "expected a boolean (true/false/1/0), got '" + v + "'");
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) {
      throw std::invalid_argument(v);
    }
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a real number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used != v.size()) {
      throw std::invalid_argument(v);
    }
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const unsigned long long out = std::stoull(v, &used);
    if (used != v.size()) {
      throw std::invalid_argument(v);
    }
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> unknown;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(line_no, "empty key");
    }
    if (key == "n") {
      cfg.n = static_cast<int>(parse_int(value, line_no));
    } else if (key == "p_link") {
      cfg.p_link = parse_double(value, line_no);
    } else if (key == "w_lo") {
      cfg.w_lo = parse_double(value, line_no);
    } else if (key == "w_hi") {
      cfg.w_hi = parse_double(value, line_no);
    } else if (key == "bw") {
      cfg.bw = static_cast<int>(parse_int(value, line_no));
    } else if (key == "p_a") {
      cfg.p_a = parse_double(value, line_no);
    } else if (key == "sigma_a") {
      cfg.sigma_a = parse_double(value, line_no);
    } else if (key == "snr_db_list") {
      cfg.snr_db_list.clear();
      for (const std::string& part : split(value, ',')) {
        cfg.snr_db_list.push_back(parse_double(trim(part), line_no));
      }
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_int(value, line_no));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, line_no);
    } else if (key == "eta") {
      cfg.eta = parse_double(value, line_no);
    } else if (key == "threshold_policy") {
      if (value == "fixed_sigma_a_sq") {
        cfg.threshold_policy = ThresholdPolicy::fixed_sigma_a_sq;
      } else if (value == "optimal") {
        cfg.threshold_policy = ThresholdPolicy::optimal;
      } else {
        throw ParseError(line_no,
                         "threshold_policy must be fixed_sigma_a_sq or optimal");
      }
    } else if (key == "eta_policy") {
      if (value == "fixed") {
        cfg.eta_policy = EtaPolicy::fixed;
      } else if (value == "optimal") {
        cfg.eta_policy = EtaPolicy::optimal;
      } else {
        throw ParseError(line_no, "eta_policy must be fixed or optimal");
      }
    } else if (key == "methods") {
      cfg.methods.clear();
      try {
        for (const std::string& part : split(value, ',')) {
          cfg.methods.push_back(method_from_name(trim(part)));
        }
      } catch (const ConfigError& err) {
        throw ParseError(line_no, err.what());
      }
    } else if (key == "graph_per_trial") {
      cfg.graph_per_trial = parse_bool(value, line_no);
    } else if (key == "fallback") {
      if (value == "lowpass") {
        cfg.fallback = FallbackPolicy::lowpass;
      } else if (value == "passthrough") {
        cfg.fallback = FallbackPolicy::passthrough;
      } else {
        throw ParseError(line_no, "fallback must be lowpass or passthrough");
      }
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, line_no);
    } else if (key == "max_outer") {
      cfg.max_outer = static_cast<int>(parse_int(value, line_no));
    } else if (key == "minres_tol") {
      cfg.minres_tol = parse_double(value, line_no);
    } else if (key == "minres_max_iter") {
      cfg.minres_max_iter = static_cast<int>(parse_int(value, line_no));
    } else if (key == "sigma_sub") {
      cfg.sigma_sub = parse_double(value, line_no);
    } else if (key == "snr_convention") {
      if (value == "per_node") {
        cfg.snr_convention = SnrConvention::per_node;
      } else if (value == "total_energy") {
        cfg.snr_convention = SnrConvention::total_energy;
      } else {
        throw ParseError(line_no,
                         "snr_convention must be per_node or total_energy");
      }
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(value, line_no));
    } else {
      unknown.push_back(key);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) {
      msg += " " + k;
    }
    throw ConfigError(msg);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str());
}

void emit_csv(const MetricsTable& table, std::ostream& out) {
  out << "snr_db,method,msd_db_mean,msd_db_stderr,trials,p_md,p_fd,"
         "fallback_rate\n";
  for (const MetricsRow& row : table.rows) {
    out << format_g10(row.snr_db) << ',' << method_name(row.method) << ','
        << format_g10(row.msd_db_mean) << ',' << format_g10(row.msd_db_stderr)
        << ',' << row.trials << ',' << format_g10(row.p_md) << ','
        << format_g10(row.p_fd) << ',' << format_g10(row.fallback_rate)
        << '\n';
  }
}

MetricsTable read_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError(1, "empty CSV");
  }
  ++line_no;
  if (trim(line) !=
      "snr_db,method,msd_db_mean,msd_db_stderr,trials,p_md,p_fd,fallback_rate") {
    throw ParseError(line_no, "unexpected CSV header");
  }
  MetricsTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> parts = split(line, ',');
    if (parts.size() != 8) {
      throw ParseError(line_no, "expected 8 comma-separated fields");
    }
    MetricsRow row;
    row.snr_db = parse_double(trim(parts[0]), line_no);
    try {
      row.method = method_from_name(trim(parts[1]));
    } catch (const ConfigError& err) {
      throw ParseError(line_no, err.what());
    }
    row.msd_db_mean = parse_double(trim(parts[2]), line_no);
    row.msd_db_stderr = parse_double(trim(parts[3]), line_no);
    row.trials = static_cast<int>(parse_int(trim(parts[4]), line_no));
    row.p_md = parse_double(trim(parts[5]), line_no);
    row.p_fd = parse_double(trim(parts[6]), line_no);
    row.fallback_rate = parse_double(trim(parts[7]), line_no);
    table.rows.push_back(row);
  }
  return table;
}

EtaSweepTable sweep_eta(const ExperimentConfig& base,
                        const std::vector<double>& eta_grid) {
  if (eta_grid.empty()) {
    throw ConfigError("sweep_eta: empty eta grid");
  }
  EtaSweepTable table;
  for (double eta : eta_grid) {
    ExperimentConfig cfg = base;
    cfg.eta = eta;
    cfg.methods = {Method::proposed_basic};
    const MetricsTable metrics = run_experiment(cfg);
    for (const MetricsRow& row : metrics.rows) {
      table.rows.push_back(EtaSweepRow{eta, row});
    }
  }
  return table;
}

void emit_eta_csv(const EtaSweepTable& table, std::ostream& out) {
  out << "eta,snr_db,msd_db_mean,msd_db_stderr,trials,p_md,p_fd,"
         "fallback_rate\n";
  for (const EtaSweepRow& row : table.rows) {
    out << format_g10(row.eta) << ',' << format_g10(row.metrics.snr_db) << ','
        << format_g10(row.metrics.msd_db_mean) << ','
        << format_g10(row.metrics.msd_db_stderr) << ',' << row.metrics.trials
        << ',' << format_g10(row.metrics.p_md) << ','
        << format_g10(row.metrics.p_fd) << ','
        << format_g10(row.metrics.fallback_rate) << '\n';
  }
}

}  // namespace sgsr
