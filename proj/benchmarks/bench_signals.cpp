#include <benchmark/benchmark.h>

#include "ovi/portfolio.hpp"
#include "ovi/returns.hpp"
#include "ovi/signals.hpp"
#include "ovi/synthetic.hpp"

using namespace ovi;

namespace {

const MarketDataset& market() {
    static const MarketDataset data = [] {
        SynthConfig cfg;
        cfg.assets = 100;
        cfg.days = 250;
        cfg.seed = 3;
        return generate_synthetic_market(cfg);
    }();
    return data;
}

void BM_ComputeOvi(benchmark::State& state) {
    const MarketDataset& data = market();
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_ovi(data, FilterSpec{}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.series_count()));
}
BENCHMARK(BM_ComputeOvi)->Unit(benchmark::kMillisecond);

void BM_ComputeOviIvBucket(benchmark::State& state) {
    const MarketDataset& data = market();
    const FilterSpec filter = FilterSpec::parse("iv_bucket=4");
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_ovi(data, filter));
    }
}
BENCHMARK(BM_ComputeOviIvBucket)->Unit(benchmark::kMillisecond);

void BM_PnlSeries(benchmark::State& state) {
    const MarketDataset& data = market();
    const Panel signals = compute_ovi(data, FilterSpec{}).mpc_panel(Mpc::MarketMaker);
    const ReturnsPanel ret = compute_returns(data, ReturnMode{});
    const StrategySpec strategy{BetKind::Uniform, static_cast<int>(state.range(0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pnl_series(signals, ret, strategy));
    }
}
BENCHMARK(BM_PnlSeries)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

}  // namespace
