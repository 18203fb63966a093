#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "fujita/grid.hpp"
#include "fujita/kernels.hpp"
#include "fujita/propagator.hpp"

namespace {

using namespace fujita;

std::vector<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 + 0.25 * std::sin(0.001 * static_cast<double>(i));
  return v;
}

void BM_PowerSumParallel(benchmark::State& state) {
  const auto u = ramp(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::power_sum(u, 2.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PowerSumSerial(benchmark::State& state) {
  const auto u = ramp(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::power_sum(u, 2.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SourceFlowParallel(benchmark::State& state) {
  auto u = ramp(state.range(0));
  for (auto _ : state) {
    kernels::source_flow(u, 1e-9, 3.0);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SourceFlowSerial(benchmark::State& state) {
  auto u = ramp(state.range(0));
  for (auto _ : state) {
    kernels::serial::source_flow(u, 1e-9, 3.0);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

const DiffusionOperator& laplacian_2d(int cells) {
  static std::vector<std::unique_ptr<DiffusionOperator>> ops;
  for (const auto& op : ops) {
    if (op->grid().cells == cells) return *op;
  }
  ops.push_back(std::make_unique<DiffusionOperator>(Weight{WeightKind::AxisPower, 0.5, 2}, Grid(2, 8.0, cells),
                                                    Boundary::Reflecting));
  return *ops.back();
}

void BM_CsrApplyParallel(benchmark::State& state) {
  const auto& op = laplacian_2d(static_cast<int>(state.range(0)));
  const auto in = ramp(op.matrix().rows);
  std::vector<double> out(in.size());
  for (auto _ : state) {
    kernels::csr_apply(op.matrix(), in, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * op.matrix().rows);
}

void BM_CsrApplySerial(benchmark::State& state) {
  const auto& op = laplacian_2d(static_cast<int>(state.range(0)));
  const auto in = ramp(op.matrix().rows);
  std::vector<double> out(in.size());
  for (auto _ : state) {
    kernels::serial::csr_apply(op.matrix(), in, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * op.matrix().rows);
}

void BM_CellAveragesParallel(benchmark::State& state) {
  const Grid g(2, 8.0, static_cast<int>(state.range(0)));
  std::vector<double> out(g.size());
  auto f = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); };
  for (auto _ : state) kernels::cell_averages(g, f, out);
  state.SetItemsProcessed(state.iterations() * g.size());
}

void BM_CellAveragesSerial(benchmark::State& state) {
  const Grid g(2, 8.0, static_cast<int>(state.range(0)));
  std::vector<double> out(g.size());
  auto f = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); };
  for (auto _ : state) kernels::serial::cell_averages(g, f, out);
  state.SetItemsProcessed(state.iterations() * g.size());
}

}  // namespace

BENCHMARK(BM_PowerSumParallel)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_PowerSumSerial)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_SourceFlowParallel)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_SourceFlowSerial)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_CsrApplyParallel)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_CsrApplySerial)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_CellAveragesParallel)->Arg(128)->Arg(256);
BENCHMARK(BM_CellAveragesSerial)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
