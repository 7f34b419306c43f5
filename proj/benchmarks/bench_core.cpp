#include <benchmark/benchmark.h>

#include "ordifun/basis.hpp"
#include "ordifun/classify.hpp"
#include "ordifun/reducers.hpp"
#include "ordifun/simulate.hpp"

namespace {

using namespace ordifun;

SimulatedData scenario_a_dataset(int n) {
    ScenarioConfig config;
    config.scenario = Scenario::a;
    config.q = 0.6;
    config.n = n;
    config.seed = 1234;
    return simulate(config);
}

void BM_EvalBasis(benchmark::State& state) {
    const BasisSpec spec(static_cast<int>(state.range(0)), Interval{0.0, 100.0});
    double t = 0.0;
    for (auto _ : state) {
        t += 0.37;
        if (t > 100.0) t -= 100.0;
        benchmark::DoNotOptimize(spec.evaluate(t, 0));
    }
}
BENCHMARK(BM_EvalBasis)->Arg(10)->Arg(20);

void BM_GramMatrices(benchmark::State& state) {
    const BasisSpec spec(static_cast<int>(state.range(0)), Interval{0.0, 100.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(gram_matrices(spec));
    }
}
BENCHMARK(BM_GramMatrices)->Arg(10)->Arg(20);

void BM_FitFocca(benchmark::State& state) {
    const SimulatedData sim = scenario_a_dataset(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_focca(sim.data, sim.labels, 1e2, 1e3, 2));
    }
}
BENCHMARK(BM_FitFocca)->Arg(200)->Arg(1000);

void BM_KfoldMae(benchmark::State& state) {
    const SimulatedData sim = scenario_a_dataset(static_cast<int>(state.range(0)));
    ReducerSpec spec;
    spec.kind = ReducerKind::focca;
    spec.lambda1 = 1e2;
    spec.lambda2 = 1e3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kfold_mae(sim.data, sim.labels, spec, 5, 7));
    }
}
BENCHMARK(BM_KfoldMae)->Arg(200)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
