#include <benchmark/benchmark.h>

#include "rephase/fuelopt.hpp"

using namespace rephase;

namespace {

void BM_FuelResidual(benchmark::State& state) {
    const auto p = fuelopt::FuelOptProblem::from_eta(5.0, 0.5, 0.01);
    const auto s = fuelopt::solve_fuel_optimal(p);
    for (auto _ : state) benchmark::DoNotOptimize(fuelopt::fuel_residual(s.l0, s.l1, p));
}
BENCHMARK(BM_FuelResidual)->Unit(benchmark::kMicrosecond);

void BM_FuelJacobian(benchmark::State& state) {
    const auto p = fuelopt::FuelOptProblem::from_eta(5.0, 0.5, 0.01);
    const auto s = fuelopt::solve_fuel_optimal(p);
    for (auto _ : state) benchmark::DoNotOptimize(fuelopt::fuel_jacobian(s.l0, s.l1, p));
}
BENCHMARK(BM_FuelJacobian)->Unit(benchmark::kMicrosecond);

void BM_SolveFuelOptimal(benchmark::State& state) {
    const double dL = static_cast<double>(state.range(0)) / 10.0;
    const auto p = fuelopt::FuelOptProblem::from_eta(dL, 0.6, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(fuelopt::solve_fuel_optimal(p).l0);
}
BENCHMARK(BM_SolveFuelOptimal)->Arg(5)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_ContinueEpsilon(benchmark::State& state) {
    const auto s = fuelopt::solve_fuel_optimal(fuelopt::FuelOptProblem::from_eta(5.0, 0.6, 0.1));
    for (auto _ : state) benchmark::DoNotOptimize(fuelopt::continue_epsilon(s, 1e-4).solution.l0);
}
BENCHMARK(BM_ContinueEpsilon)->Unit(benchmark::kMillisecond);

}  // namespace
