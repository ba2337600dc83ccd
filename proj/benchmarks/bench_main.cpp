// Microbenchmarks for the hot paths: per-node statistic evaluation, full
// detection, ratio minimization, spectral decomposition, and one benchmark
// trial end to end.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "sgsr/detector.hpp"
#include "sgsr/graph.hpp"
#include "sgsr/harness.hpp"
#include "sgsr/random.hpp"
#include "sgsr/recovery.hpp"
#include "sgsr/signals.hpp"
#include "sgsr/threat.hpp"

namespace {

using namespace sgsr;

struct Scene {
  Graph g;
  Laplacian lap;
  GraphSignal observed;
  Eigen::VectorXi mask;
  double sigma_nu = 0.0;
};

Scene make_scene(std::uint64_t seed, int n) {
  RandomStream rng(seed);
  Graph g = erdos_renyi(n, 0.3, 0.5, 1.0, rng);
  Laplacian lap = laplacian(g);
  const GftBasis basis = GftBasis::from_laplacian(lap);
  const GraphSignal truth = synth_bandlimited(basis, 2, rng);
  const AttackScenario atk = sample_attack(n, 0.2, 5.0, rng);
  const double sigma_nu = noise_sigma_for_snr(truth, 20.0);
  const Observation obs = observe(truth, atk, sigma_nu, rng);
  const DetectorParams params = DetectorParams::basic(n, 0.8, 5.0, sigma_nu);
  const DetectionResult det = detect(lap, obs.observed, params);
  return Scene{std::move(g), std::move(lap), obs.observed, det.estimated_mask,
               sigma_nu};
}

void bm_statistic(benchmark::State& state) {
  const Scene s = make_scene(1, static_cast<int>(state.range(0)));
  int k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(statistic(s.lap, s.observed, k, 0.8));
    k = (k + 1) % s.lap.order();
  }
}
BENCHMARK(bm_statistic)->Arg(20)->Arg(100);

void bm_detect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scene s = make_scene(2, n);
  const DetectorParams params = DetectorParams::basic(n, 0.8, 5.0, s.sigma_nu);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect(s.lap, s.observed, params));
  }
}
BENCHMARK(bm_detect)->Arg(20)->Arg(100);

void bm_calibrated_detect(benchmark::State& state) {
  const Scene s = make_scene(3, 20);
  const DetectorParams params =
      DetectorParams::basic(20, 0.8, 5.0, s.sigma_nu);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_calibrated(s.lap, s.observed, params,
                                               ThresholdPolicy::optimal,
                                               EtaPolicy::optimal, 1e-6));
  }
}
BENCHMARK(bm_calibrated_detect)->Unit(benchmark::kMillisecond);

void bm_ratio_solve(benchmark::State& state) {
  Scene s = make_scene(4, static_cast<int>(state.range(0)));
  if (s.mask.sum() == 0) {
    s.mask[0] = 1;
  }
  const FractionalProblem p = build_problem(s.lap, s.observed, s.mask);
  const RecoveryConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dinkelbach_solve(p, cfg));
  }
}
BENCHMARK(bm_ratio_solve)->Arg(20)->Arg(100);

void bm_spectral_decomposition(benchmark::State& state) {
  RandomStream rng(5);
  const Graph g =
      erdos_renyi(static_cast<int>(state.range(0)), 0.3, 0.5, 1.0, rng);
  const Laplacian lap = laplacian(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GftBasis::from_laplacian(lap));
  }
}
BENCHMARK(bm_spectral_decomposition)->Arg(20)->Arg(100)->Arg(300);

void bm_trial(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.threads = 1;
  std::uint64_t trial = 0;
  for (auto _ : state) {
    RandomStream rng(derive_seed(cfg.seed, 1, trial++));
    benchmark::DoNotOptimize(run_trial(cfg, 20.0, rng));
  }
}
BENCHMARK(bm_trial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
