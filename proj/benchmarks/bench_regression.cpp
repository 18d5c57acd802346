#include <benchmark/benchmark.h>

#include <random>

#include "ovi/regression.hpp"

using namespace ovi;

namespace {

struct Problem {
    FeatureTensor a;
    Panel f;
};

Problem make_problem(std::size_t n, std::size_t days, std::size_t k) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    std::vector<Date> ds;
    std::vector<std::string> names;
    for (std::size_t d = 0; d < days; ++d) ds.emplace_back(static_cast<std::int32_t>(d));
    for (std::size_t i = 0; i < n; ++i) names.push_back("A" + std::to_string(i));
    Problem p{FeatureTensor(n, days, k), Panel(ds, names)};
    for (auto& v : p.a.values) v = z(rng);
    for (auto& v : p.f.values) v = 0.02 * z(rng);
    return p;
}

// One objective + gradient evaluation over a 500-day training window.
void BM_ObjectiveAndGradient(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Problem p = make_problem(n, 500, 5);
    HyperParams hp;
    hp.lambda = 0.01;
    std::vector<double> beta{0.0, 0.3, -0.2, 0.1, 0.05, -0.4}, grad(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(soft_pnl_objective(beta, p.a, p.f, hp, {}, grad));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 500));
}
BENCHMARK(BM_ObjectiveAndGradient)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_AdamFit(benchmark::State& state) {
    const Problem p = make_problem(50, 500, 5);
    HyperParams hp;
    hp.max_iters = static_cast<int>(state.range(0));
    const ObjectiveFn f = [&](std::span<const double> b, std::span<double> g) {
        return soft_pnl_objective(b, p.a, p.f, hp, {}, g);
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(adam_minimize(f, std::vector<double>(6, 0.0), hp));
    }
}
BENCHMARK(BM_AdamFit)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
