#include <benchmark/benchmark.h>

#include <cmath>

#include "rephase/numerics/quadrature.hpp"
#include "rephase/timeopt.hpp"

using namespace rephase;

namespace {

void BM_ShootingIntegrals(benchmark::State& state) {
    const double dL = static_cast<double>(state.range(0));
    const double l1 = timeopt::solve_lambda1(dL);
    for (auto _ : state) benchmark::DoNotOptimize(timeopt::shooting_integrals(dL, l1));
}
BENCHMARK(BM_ShootingIntegrals)->Arg(1)->Arg(10)->Arg(100);

void BM_F1Partials(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(timeopt::f1_partials(12.0, 1.1));
}
BENCHMARK(BM_F1Partials);

void BM_QuadOscillatory(benchmark::State& state) {
    const double b = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            numerics::quad_adaptive([](double x) { return std::sqrt(1.3 - std::cos(x)); }, 0.0, b));
    }
}
BENCHMARK(BM_QuadOscillatory)->Arg(10)->Arg(100);

void BM_SolveTimeOptimal(benchmark::State& state) {
    const double chi = std::pow(10.0, static_cast<double>(state.range(0)));
    timeopt::TimeOptOptions opt;
    opt.strategy = state.range(1) ? timeopt::Strategy::hybrid2d : timeopt::Strategy::double_loop;
    const auto p = timeopt::TimeOptProblem::from_chi(chi);
    for (auto _ : state) benchmark::DoNotOptimize(timeopt::solve_time_optimal(p, opt).delta_L);
}
BENCHMARK(BM_SolveTimeOptimal)
    ->ArgNames({"log10chi", "hybrid"})
    ->ArgsProduct({{-2, 1, 3}, {0, 1}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
