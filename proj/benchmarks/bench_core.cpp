#include <benchmark/benchmark.h>

#include "fjscb/pipeline.hpp"
#include "fjscb/simulate.hpp"

namespace {

fjscb::FunctionalDataSet dataset(std::size_t n) {
  fjscb::DgpConfig cfg;
  cfg.n = n;
  return fjscb::center(fjscb::simulate_dataset(cfg, 7).data);
}

void BM_BasisEval(benchmark::State& state) {
  const auto basis = fjscb::BasisSet::legendre(static_cast<std::size_t>(state.range(0)));
  const auto grid = fjscb::uniform_grid(201);
  for (auto _ : state) benchmark::DoNotOptimize(basis.eval(grid));
}
BENCHMARK(BM_BasisEval)->Arg(10)->Arg(25);

void BM_FitModel(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)));
  const fjscb::TuningConfig tuning;
  for (auto _ : state) benchmark::DoNotOptimize(fjscb::fit_model(data, fjscb::WorkingBasis::Fourier, tuning));
}
BENCHMARK(BM_FitModel)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Band(benchmark::State& state) {
  const auto data = dataset(400);
  const auto model = fjscb::fit_model(data, fjscb::WorkingBasis::Fourier, {});
  fjscb::BootstrapPlan plan;
  plan.replicates = static_cast<std::size_t>(state.range(0));
  plan.weight_mode = fjscb::WeightMode::StdDriven;
  for (auto _ : state) benchmark::DoNotOptimize(fjscb::band_model(model, plan));
}
BENCHMARK(BM_Band)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BlockCovariance(benchmark::State& state) {
  const auto data = dataset(800);
  const auto model = fjscb::fit_model(data, fjscb::WorkingBasis::Fourier, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fjscb::select_block_mv(model.z_hat, fjscb::default_m_grid(800)));
  }
}
BENCHMARK(BM_BlockCovariance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
