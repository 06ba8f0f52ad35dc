// Serial reference vs OpenMP exclusion-gain scan.
#include <benchmark/benchmark.h>

#include <vector>

#include "rulekit/kernels.hpp"
#include "rulekit/subproblem.hpp"
#include "rulekit/synthetic.hpp"

namespace {

struct Fixture {
  rulekit::BinaryDataset data;
  rulekit::SubproblemInstance inst;
  rulekit::BitVector coverage;
  std::vector<rulekit::FeatureIndex> features;

  Fixture(std::size_t n, std::size_t d)
      : data(rulekit::random_binary_dataset(n, d, 42, 0.7)),
        inst(rulekit::build_instance(rulekit::RuleSet(n), data, rulekit::Hyperparams{}, 1.0)),
        coverage(data.column(0) | data.column(1)) {
    for (std::size_t j = 0; j < d; ++j) features.push_back(static_cast<rulekit::FeatureIndex>(j));
  }
};

void run(benchmark::State& state, rulekit::Exec exec) {
  static Fixture fx(20000, 1024);
  const auto d = static_cast<std::size_t>(state.range(0));
  std::span<const rulekit::FeatureIndex> feats(fx.features.data(), d);
  std::vector<rulekit::ExclusionGain> out(d);
  for (auto _ : state) {
    if (exec == rulekit::Exec::serial)
      rulekit::kernels::exclusion_gains_serial(fx.inst, fx.coverage, feats, out);
    else
      rulekit::kernels::exclusion_gains(fx.inst, fx.coverage, feats, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d));
}

void BM_ExclusionGainsSerial(benchmark::State& state) { run(state, rulekit::Exec::serial); }
void BM_ExclusionGainsParallel(benchmark::State& state) { run(state, rulekit::Exec::parallel); }

}  // namespace

BENCHMARK(BM_ExclusionGainsSerial)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_ExclusionGainsParallel)->RangeMultiplier(4)->Range(64, 1024);

BENCHMARK_MAIN();
