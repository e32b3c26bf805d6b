#include <benchmark/benchmark.h>

#include "risopt/channel_model.hpp"
#include "risopt/smm.hpp"
#include "risopt/ssca.hpp"

using namespace risopt;

namespace {

SystemConfig config_with(int ris_count, int elements) {
  SystemConfig c;
  c.ris_count = ris_count;
  c.elements_per_ris = elements;
  return c;
}

void BM_SampleRealization(benchmark::State& state) {
  const SystemConfig config = config_with(static_cast<int>(state.range(0)), 64 / static_cast<int>(state.range(0)));
  RandomStream rng(1);
  const Snapshot snap = sample_snapshot(config, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sample_realization(snap, config, rng));
}
BENCHMARK(BM_SampleRealization)->Arg(1)->Arg(2)->Arg(8);

void BM_SscaStep(benchmark::State& state) {
  const SystemConfig config = config_with(2, static_cast<int>(state.range(0)));
  RandomStream rng(2);
  const Snapshot snap = sample_snapshot(config, rng);
  const ChannelRealization chan = sample_realization(snap, config, rng);
  const LinkBudget budget = LinkBudget::from_config(config);
  SscaState s = SscaState::initial(RVector::Zero(config.total_elements()));
  for (auto _ : state) {
    s = ssca_step(s, chan, SscaParams{}, budget);
    benchmark::DoNotOptimize(s.phi.data());
  }
}
BENCHMARK(BM_SscaStep)->Arg(10)->Arg(20)->Arg(32);

void BM_SmmStep(benchmark::State& state) {
  const SystemConfig config = config_with(2, static_cast<int>(state.range(0)));
  RandomStream rng(3);
  const Snapshot snap = sample_snapshot(config, rng);
  const ChannelRealization chan = sample_realization(snap, config, rng);
  SmmState s = SmmState::initial(PhaseVector::ones(config.total_elements()));
  for (auto _ : state) {
    s = smm_step(s, chan, SmmParams{});
    benchmark::DoNotOptimize(s.theta.theta().data());
  }
}
BENCHMARK(BM_SmmStep)->Arg(10)->Arg(20)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
