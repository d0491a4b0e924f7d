// Serial reference vs OpenMP kernels. Arg(0) = serial, Arg(1) = parallel.
#include <benchmark/benchmark.h>

#include "levelset/kernels.hpp"

using namespace lsq;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

std::vector<Point> points(std::size_t n) {
  CounterRng rng(9, 0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({-2.0 + 4.0 * rng.uniform01(), -2.0 + 4.0 * rng.uniform01()});
  return pts;
}

void BM_Probe(benchmark::State& state) {
  const OracleClassifier oracle(gaussian_three_class_example());
  const auto pts = points(200);
  const auto grid = PrevalenceGrid::standard();
  for (auto _ : state) benchmark::DoNotOptimize(probe_points(oracle, pts, grid, 0, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size()));
}

void BM_Audit(benchmark::State& state) {
  const OracleClassifier oracle(gaussian_three_class_example());
  const auto pts = points(500);
  std::vector<RatioIntervalMatrix> mats;
  for (const auto& p : probe_points(oracle, pts, PrevalenceGrid::standard(), 0, Execution::Parallel)) {
    mats.push_back(p.matrix);
  }
  const auto chi = SimplexVector::make({0.2, 0.3, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(audit_points(mats, chi, 1e-9, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mats.size()));
}

void BM_LabelMap(benchmark::State& state) {
  const ExactPrevalenceTable table(gaussian_three_class_example());
  const auto pts = points(10000);
  const auto chi = SimplexVector::uniform(3);
  for (auto _ : state) benchmark::DoNotOptimize(label_map(table, chi, pts, TieRule::lowest_index(), mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size()));
}

void BM_Normalization(benchmark::State& state) {
  const auto dens = gaussian_three_class_example();
  const TensorGrid box({-6.0, -6.0}, {6.0, 6.0}, {200, 200});
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalization_check(dens, exact_ratio_source(dens), box, 1.0, mode(state)));
  }
}

void BM_Gradient(benchmark::State& state) {
  const auto data = TrainingDataset::from_samples(
      sample_population(gaussian_three_class_example(), SimplexVector::uniform(3), 20000, 3), 3);
  const auto model = ScorerModel::random({2, 8, 3}, 1);
  const auto q = SimplexVector::uniform(3);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(model, data, q, 1.0, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}

}  // namespace

BENCHMARK(BM_Probe)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Audit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelMap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Normalization)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
