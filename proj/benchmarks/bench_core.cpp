#include <benchmark/benchmark.h>

#include "tiergrade/design.hpp"
#include "tiergrade/incentives.hpp"
#include "tiergrade/model.hpp"

namespace {

using namespace tiergrade;

const ModelParams& params() {
    static const ModelParams p(0.5, 0.5, CostFunction::quadratic(2.0));
    return p;
}

void BM_marginal_benefit(benchmark::State& state) {
    const GradingRule g = GradingRule::tough(0.5);
    double x = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(marginal_benefit(g, x));
        x = 0.1 + 0.8 * (x * 997.0 - static_cast<long>(x * 997.0));  // cheap scramble
    }
}
BENCHMARK(BM_marginal_benefit);

void BM_equilibrium_effort(benchmark::State& state) {
    const GradingRule g = GradingRule::tough(0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(equilibrium_effort(0.25, g, params()).effort);
}
BENCHMARK(BM_equilibrium_effort);

void BM_theta_dagger(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(theta_dagger(params()).value);
}
BENCHMARK(BM_theta_dagger);

void BM_optimal_two_tier(benchmark::State& state) {
    std::vector<Student> pop;
    const int n = static_cast<int>(state.range(0));
    for (int i = 0; i < n; ++i)
        pop.push_back({"s" + std::to_string(i), 0.01 + 0.48 * i / (n - 1.0)});
    for (auto _ : state)
        benchmark::DoNotOptimize(optimal_two_tier(pop, params()).report.total);
}
BENCHMARK(BM_optimal_two_tier)->Arg(16)->Arg(64)->Arg(256);

void BM_constrained_optimal(benchmark::State& state) {
    const TypeDistribution F = TypeDistribution::uniform(0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(constrained_optimal(F, params()).welfare);
}
BENCHMARK(BM_constrained_optimal);

}  // namespace

BENCHMARK_MAIN();
