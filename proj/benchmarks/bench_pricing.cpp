#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ovi/pricing.hpp"

using namespace ovi;

namespace {

std::vector<BsInputs> random_inputs(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BsInputs> v(n);
    for (auto& in : v) {
        in = {80.0 + 40.0 * u(rng), 100.0, 0.05 + 1.5 * u(rng), 0.03, 0.1 + 0.9 * u(rng),
              u(rng) < 0.5 ? OptionSide::Call : OptionSide::Put};
    }
    return v;
}

void BM_Price(benchmark::State& state) {
    const auto inputs = random_inputs(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bs_price(inputs[i++ & 1023]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Price);

void BM_Greeks(benchmark::State& state) {
    const auto inputs = random_inputs(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bs_greeks(inputs[i++ & 1023]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Greeks);

void BM_ImpliedVolatility(benchmark::State& state) {
    const auto inputs = random_inputs(1024);
    std::vector<double> prices;
    for (const auto& in : inputs) prices.push_back(bs_price(in));
    std::size_t i = 0;
    for (auto _ : state) {
        const std::size_t k = i++ & 1023;
        benchmark::DoNotOptimize(implied_volatility(prices[k], inputs[k]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ImpliedVolatility);

}  // namespace
