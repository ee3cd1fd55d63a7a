#include <benchmark/benchmark.h>

#include "rephase/nonlinear.hpp"
#include "rephase/timeopt.hpp"

using namespace rephase;

namespace {

void BM_NonlinearTime(benchmark::State& state) {
    const double dt_f = -0.1, a_max = 0.01;
    const auto lin = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(dt_f, a_max));
    const auto guess = nonlinear::map_linear_costates(lin);
    const auto p = nonlinear::NonlinProblem::time(dt_f, a_max);
    for (auto _ : state) benchmark::DoNotOptimize(nonlinear::solve_nonlinear(p, guess).tof);
}
BENCHMARK(BM_NonlinearTime)->Unit(benchmark::kMillisecond);

void BM_NonlinearPropagate(benchmark::State& state) {
    const auto lin = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(-0.1, 0.01));
    const auto s = nonlinear::solve_nonlinear(nonlinear::NonlinProblem::time(-0.1, 0.01),
                                              nonlinear::map_linear_costates(lin));
    for (auto _ : state) {
        const auto sol = nonlinear::propagate_nonlinear(s.arc(), s.costates);
        benchmark::DoNotOptimize(sol.steps());
    }
}
BENCHMARK(BM_NonlinearPropagate)->Unit(benchmark::kMicrosecond);

}  // namespace
