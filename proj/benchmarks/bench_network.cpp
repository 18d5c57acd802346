#include <benchmark/benchmark.h>

#include "ovi/network.hpp"
#include "ovi/returns.hpp"
#include "ovi/signals.hpp"
#include "ovi/synthetic.hpp"

using namespace ovi;

namespace {

void BM_EdgeTests(benchmark::State& state) {
    SynthConfig cfg;
    cfg.assets = static_cast<std::size_t>(state.range(0));
    cfg.days = 750;
    cfg.seed = 5;
    cfg.mpcs = {Mpc::MarketMaker};
    const MarketDataset data = generate_synthetic_market(cfg);
    const Panel signals = compute_ovi(data, FilterSpec{}).mpc_panel(Mpc::MarketMaker);
    const ReturnsPanel ret = compute_returns(data, ReturnMode{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(edge_tests(signals, ret));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_EdgeTests)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
