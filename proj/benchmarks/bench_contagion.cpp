#include <benchmark/benchmark.h>

#include "contagion/experiment.hpp"

using namespace contagion;

static void BM_ErdosRenyi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_erdos_renyi(n, 2.5 / double(n), RngStream{1, seed++}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ErdosRenyi)->RangeMultiplier(4)->Range(500, 32000)->Complexity();

static void BM_PreferentialAttachment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_preferential_attachment(n, 2.5 / double(n), RngStream{1, seed++}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PreferentialAttachment)->RangeMultiplier(4)->Range(500, 32000)->Complexity();

static void BM_Weights(benchmark::State& state) {
  const Topology t = gen_preferential_attachment(500, 0.005, RngStream{2, 0});
  for (auto _ : state) benchmark::DoNotOptimize(compute_weights(t, 2, 2, 0.1, 1.0));
}
BENCHMARK(BM_Weights);

static void BM_BalanceSheets(benchmark::State& state) {
  const Topology t = gen_erdos_renyi(500, 0.005, RngStream{2, 0});
  const WeightMatrix w = compute_weights(t, 0, 0, 0.1, 1.0);
  BalanceSheetSet sheets;
  for (auto _ : state) {
    build_balance_sheets_into(w, 0.1, 0.05, 1.0, sheets);
    benchmark::DoNotOptimize(sheets.net_worth.data());
  }
}
BENCHMARK(BM_BalanceSheets);

// Arg 0: ratio in thousandths. Small R drives system-wide cascades.
static void BM_Cascade(benchmark::State& state) {
  const Topology t = gen_erdos_renyi(500, 0.005, RngStream{3, 0});
  const WeightMatrix w = compute_weights(t, 0, 0, 0.1, 1.0);
  const BalanceSheetSet sheets = build_balance_sheets(w, 0.1, double(state.range(0)) / 1000.0, 1.0);
  CascadeRunner runner;
  BankIndex bank = 0;
  std::size_t defaults = 0;
  for (auto _ : state) {
    defaults += runner.count_defaults(sheets, w, bank, LossRule::PaperMax);
    bank = (bank + 1) % 500;
  }
  state.counters["mean_N_d"] = benchmark::Counter(double(defaults), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Cascade)->Arg(20)->Arg(50)->Arg(100);

static void BM_Replication(benchmark::State& state) {
  ScenarioConfig c;
  c.topology_kind = state.range(0) ? TopologyKind::Heterogeneous : TopologyKind::Homogeneous;
  if (c.topology_kind == TopologyKind::Heterogeneous) c.s = c.t = 2;
  c.r_grid = {0.05};
  c.master_seed = 5;
  std::uint64_t idx = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replication(c, 0.05, idx++));
}
BENCHMARK(BM_Replication)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
