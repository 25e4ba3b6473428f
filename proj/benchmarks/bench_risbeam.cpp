#include <benchmark/benchmark.h>

#include "risbeam/bcd_optimizer.hpp"
#include "risbeam/channel.hpp"
#include "risbeam/harness.hpp"
#include "risbeam/ls_beamformer.hpp"
#include "risbeam/subarray.hpp"
#include "risbeam/wmmse.hpp"

namespace {

using namespace risbeam;

struct Setup {
  SystemConfig config;
  ChannelSet channels;
  PartitionPlan plan;
  std::vector<CVector> receive;
  RVector weights;

  explicit Setup(int ris_side, PartitionMode mode = PartitionMode::subarray)
      : plan(make_partition(ris_side * ris_side, 4, mode)) {
    config.ris_side = ris_side;
    config.mode = mode;
    Rng rng(1);
    const ScenarioGeometry geo = make_scenario(config, rng);
    channels = build_channel_set(config, geo, {config.k1, config.k2}, rng);
    const auto cands = receive_candidates({config.user_width, config.user_height, 0.5},
                                          make_receive_grid(config.azimuth_bits, config.elevation_bits));
    receive.assign(config.users, cands.front());
    weights = RVector::Ones(config.users);
  }
};

void BM_BuildChannelSet(benchmark::State& state) {
  SystemConfig config;
  config.ris_side = static_cast<int>(state.range(0));
  Rng geo_rng(3);
  const ScenarioGeometry geo = make_scenario(config, geo_rng);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(build_channel_set(config, geo, {}, rng));
}
BENCHMARK(BM_BuildChannelSet)->Arg(6)->Arg(10)->Arg(12);

void BM_Wmmse(benchmark::State& state) {
  const Setup s(10);
  const CMatrix rows = equivalent_channels(s.channels, PhaseVector::ones(100), s.plan, s.receive);
  for (auto _ : state)
    benchmark::DoNotOptimize(wmmse_precoder(rows, s.weights, 1.0, s.config.transmit_power()));
}
BENCHMARK(BM_Wmmse);

void BM_LinearizedRows(benchmark::State& state) {
  const Setup s(10);
  const auto lin = linearize_channels(s.channels, s.plan, s.receive);
  const PhaseVector theta = PhaseVector::ones(100);
  for (auto _ : state) benchmark::DoNotOptimize(rows_from_linearized(lin, theta));
}
BENCHMARK(BM_LinearizedRows);

void BM_PhaseSweep(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), PartitionMode::whole);
  const int n = s.config.ris_elements();
  const auto lin = linearize_channels(s.channels, s.plan, s.receive);
  const PhaseVector theta = PhaseVector::ones(n);
  const CMatrix rows = rows_from_linearized(lin, theta);
  const CMatrix w = mrt_precoder(rows, s.config.transmit_power());
  const FpAuxiliaries aux = optimal_auxiliaries(rows, w, s.weights, 1.0);
  const QuadraticForm form = build_quadratic_form(lin, n, w, aux, s.weights);
  for (auto _ : state) benchmark::DoNotOptimize(update_phases(theta, form));
}
BENCHMARK(BM_PhaseSweep)->Arg(6)->Arg(10)->Arg(12);

void BM_LsOptimize(benchmark::State& state) {
  const Setup s(10);
  const LsParams p{s.weights, 1.0, s.config.transmit_power(), {}};
  const auto set = make_phase_set(s.config.phase_bits);
  Rng rng(5);
  for (auto _ : state)
    benchmark::DoNotOptimize(ls_optimize(s.channels, s.plan, s.receive, set, p, rng));
}
BENCHMARK(BM_LsOptimize)->Unit(benchmark::kMillisecond);

void BM_BcdSolve(benchmark::State& state) {
  const Setup s(10);
  Rng rng(6);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bcd_solve(s.channels, s.plan, s.receive, s.weights, 1.0, s.config.transmit_power(), {}, rng));
}
BENCHMARK(BM_BcdSolve)->Unit(benchmark::kMillisecond);

void BM_SweepTrial(benchmark::State& state) {
  SystemConfig config;
  config.trials = 1;
  config.algorithm = state.range(0) ? Algorithm::bcd : Algorithm::wmmse_ls;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(config, SweepVariable::snr_db, {5}));
}
BENCHMARK(BM_SweepTrial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
