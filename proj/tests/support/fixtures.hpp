#pragma once

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ovi/dataset.hpp"

namespace ovi::testing {

inline Date day(int i) { return Date::from_ymd(2020, 1, 6) + i; }

/// Hand-built markets for unit tests. Every asset (plus the benchmark) gets equity bars on every
/// day, and every contract that trades gets a same-day summary.
class MiniMarket {
public:
    MiniMarket(std::vector<std::string> assets, int days, DatasetOptions opts = {})
        : builder_(opts), assets_(std::move(assets)), days_(days), benchmark_(opts.benchmark) {}

    ContractKey contract(const std::string& asset, OptionSide side, double strike = 100.0, int expiry_day = 40) {
        return ContractKey{asset, side, strike, day(expiry_day)};
    }

    void flow(int d, const ContractKey& c, Mpc mpc, TradeSide side, std::int64_t volume, Intent intent = Intent::Open,
              int slot = kSlotsPerDay, const std::string& exchange = "PHLX", std::int64_t trades = -1) {
        if (mpc == Mpc::MarketMaker) intent = Intent::Unspecified;
        VolumeBucket b;
        b.day = day(d);
        b.slot = slot;
        b.contract = c;
        b.mpc = mpc;
        b.trade_side = side;
        b.intent = intent;
        b.cum_volume = volume;
        b.cum_trades = trades < 0 ? (volume > 0 ? 1 : 0) : trades;
        b.exchange = exchange;
        builder_.add_bucket(b);
        touched_.insert({d, c});
    }

    void summary(int d, const ContractKey& c, double open, double close, std::int64_t oi, std::int64_t total = 0) {
        DailyOptionSummary s;
        s.day = day(d);
        s.contract = c;
        s.open_px = open;
        s.close_px = close;
        s.low_px = std::min(open, close);
        s.high_px = std::max(open, close);
        s.open_interest = oi;
        s.total_volume = total;
        builder_.add_summary(s);
        summarized_.insert({d, c});
    }

    void equity(const std::string& asset, int d, double open, double close) {
        builder_.add_equity(EquityBar{asset, day(d), open, close});
        priced_.insert({asset, d});
    }

    MarketDataset build() && {
        for (const auto& [d, c] : touched_) {
            if (!summarized_.count({d, c})) summary(d, c, 1.0, 1.0, 100);
        }
        std::vector<std::string> all = assets_;
        all.push_back(benchmark_);
        for (const auto& a : all) {
            for (int d = 0; d < days_; ++d) {
                if (!priced_.count({a, d})) builder_.add_equity(EquityBar{a, day(d), 100.0, 100.0});
            }
        }
        return std::move(builder_).build();
    }

private:
    DatasetBuilder builder_;
    std::vector<std::string> assets_;
    int days_;
    std::string benchmark_;
    std::set<std::tuple<int, ContractKey>> touched_;
    std::set<std::tuple<int, ContractKey>> summarized_;
    std::set<std::tuple<std::string, int>> priced_;
};

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ovi_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace ovi::testing
