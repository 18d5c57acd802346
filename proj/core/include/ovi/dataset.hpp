#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ovi/types.hpp"

namespace ovi {

using DayIndex = std::uint32_t;
using AssetIndex = std::uint32_t;
using ContractId = std::uint32_t;
using ExchangeId = std::uint16_t;

inline constexpr const char* kDefaultBenchmark = "SPY";

/// One raw cumulative report point.
struct SlotPoint {
    std::uint8_t slot = 1;
    std::int64_t cum_volume = 0;
    std::int64_t cum_trades = 0;
};

/// Cumulative intraday series of one (contract, exchange, mpc, side, intent) on one day.
struct FlowSeries {
    ContractId contract = 0;
    ExchangeId exchange = 0;
    Mpc mpc = Mpc::Customer;
    TradeSide side = TradeSide::Buy;
    Intent intent = Intent::Open;
    std::uint32_t first_point = 0;
    std::uint32_t point_count = 0;
};

/// Per contract-day summary, keyed by interned contract id.
struct SummaryRecord {
    ContractId contract = 0;
    double open_px = 0.0;
    double close_px = 0.0;
    double low_px = 0.0;
    double high_px = 0.0;
    std::int64_t open_interest = 0;
    std::int64_t total_volume = 0;

    [[nodiscard]] double mid_px() const noexcept { return 0.5 * (open_px + close_px); }
};

struct EquityQuote {
    double open_px = 0.0;
    double close_px = 0.0;
};

/// Data corrections applied while building a dataset.
struct DataQualityReport {
    /// Cumulative decreases that were clamped to a zero window volume.
    std::size_t clamped_volume_decrements = 0;
    std::size_t clamped_trade_decrements = 0;
    /// Human-readable keys of the first few clamped series.
    std::vector<std::string> clamped_keys;
};

struct DatasetOptions {
    std::string benchmark = kDefaultBenchmark;
    /// Accept cumulative decreases (exchange corrections) and clamp them instead of failing.
    bool clamp_corrections = false;
};

class MarketDataset;

/// Accumulates raw records and validates them into an immutable MarketDataset.
class DatasetBuilder {
public:
    explicit DatasetBuilder(DatasetOptions options = {});

    ContractId intern_contract(const ContractKey& key);
    ExchangeId intern_exchange(const std::string& label);

    void add_bucket(const VolumeBucket& bucket);
    void add_point(Date day, ContractId contract, ExchangeId exchange, Mpc mpc, TradeSide side,
                   Intent intent, int slot, std::int64_t cum_volume, std::int64_t cum_trades);
    void add_summary(const DailyOptionSummary& summary);
    /// Same as above for an already interned contract.
    void add_summary(Date day, const SummaryRecord& record);
    void add_equity(const EquityBar& bar);

    void reserve_points(std::size_t n) { points_.reserve(n); }
    void reserve_summaries(std::size_t n) { summaries_.reserve(n); }

    /// Validates every dataset invariant; throws ValidationError on the first violation.
    [[nodiscard]] MarketDataset build() &&;

private:
    struct RawPoint {
        std::int32_t day;
        ContractId contract;
        ExchangeId exchange;
        Mpc mpc;
        TradeSide side;
        Intent intent;
        std::uint8_t slot;
        std::int64_t cum_volume;
        std::int64_t cum_trades;
    };
    struct RawSummary {
        std::int32_t day;
        SummaryRecord record;
    };

    DatasetOptions options_;
    std::vector<ContractKey> contracts_;
    std::map<ContractKey, ContractId> contract_ids_;
    std::vector<std::string> exchanges_;
    std::vector<RawPoint> points_;
    std::vector<RawSummary> summaries_;
    std::vector<EquityBar> equities_;
};

/// Immutable panel of option flow reports, option summaries and equity bars.
///
/// Assets are the option underlyings, ordered lexicographically by id; this order is the
/// asset index used by every downstream panel. Safe for concurrent reads.
class MarketDataset {
public:
    MarketDataset() = default;

    [[nodiscard]] const std::vector<Date>& days() const noexcept { return days_; }
    [[nodiscard]] std::size_t day_count() const noexcept { return days_.size(); }
    [[nodiscard]] const std::vector<std::string>& assets() const noexcept { return assets_; }
    [[nodiscard]] std::size_t asset_count() const noexcept { return assets_.size(); }
    [[nodiscard]] std::optional<AssetIndex> asset_index(const std::string& id) const;
    [[nodiscard]] std::optional<DayIndex> day_index(Date day) const;

    [[nodiscard]] const std::vector<std::string>& exchanges() const noexcept { return exchanges_; }
    [[nodiscard]] std::optional<ExchangeId> exchange_id(const std::string& label) const;

    [[nodiscard]] std::size_t contract_count() const noexcept { return contracts_.size(); }
    [[nodiscard]] const ContractKey& contract(ContractId id) const { return contracts_.at(id); }
    [[nodiscard]] AssetIndex contract_asset(ContractId id) const { return contract_asset_.at(id); }

    /// All flow series of one asset on one day, sorted by (contract, exchange, mpc, side, intent).
    [[nodiscard]] std::span<const FlowSeries> series(DayIndex day, AssetIndex asset) const;
    [[nodiscard]] std::span<const SlotPoint> points(const FlowSeries& s) const;
    [[nodiscard]] std::size_t series_count() const noexcept { return series_.size(); }
    [[nodiscard]] std::size_t point_count() const noexcept { return points_.size(); }

    /// Volume traded from the open through the end of `slot`, with corrections clamped.
    [[nodiscard]] std::int64_t volume_through(const FlowSeries& s, int slot = kSlotsPerDay) const;
    [[nodiscard]] std::int64_t trades_through(const FlowSeries& s, int slot = kSlotsPerDay) const;
    /// Per-window (differenced) volumes for slots 1..39; index 0 is slot 1.
    void window_volumes(const FlowSeries& s, std::span<double, kSlotsPerDay> out) const;

    /// Summaries of one day, sorted by contract id.
    [[nodiscard]] std::span<const SummaryRecord> summaries(DayIndex day) const;
    [[nodiscard]] const SummaryRecord* summary(DayIndex day, ContractId contract) const;

    [[nodiscard]] std::optional<EquityQuote> equity(AssetIndex asset, DayIndex day) const;
    [[nodiscard]] std::optional<EquityQuote> equity(const std::string& id, DayIndex day) const;

    [[nodiscard]] const std::string& benchmark() const noexcept { return benchmark_; }
    [[nodiscard]] std::optional<EquityQuote> benchmark_quote(DayIndex day) const;
    /// True iff the benchmark has bars on every day of the panel.
    [[nodiscard]] bool has_full_benchmark() const;

    [[nodiscard]] const DataQualityReport& data_quality() const noexcept { return quality_; }

    /// Record views, for serialization. Ordered by (day, underlying, contract, ...).
    [[nodiscard]] std::vector<VolumeBucket> buckets() const;
    [[nodiscard]] std::vector<DailyOptionSummary> daily_summaries() const;
    [[nodiscard]] std::vector<EquityBar> equity_bars() const;

private:
    friend class DatasetBuilder;

    [[nodiscard]] std::int64_t clean_through(const FlowSeries& s, int slot, bool trades) const;

    std::vector<Date> days_;
    std::vector<std::string> assets_;
    std::vector<std::string> exchanges_;
    std::vector<ContractKey> contracts_;
    std::vector<AssetIndex> contract_asset_;

    std::vector<FlowSeries> series_;
    std::vector<SlotPoint> points_;
    std::vector<std::uint32_t> cell_offsets_;  // (day * assets + asset) -> series_ range

    std::vector<SummaryRecord> summaries_;
    std::vector<std::uint32_t> summary_offsets_;  // day -> summaries_ range

    std::vector<std::string> equity_ids_;
    std::vector<std::int32_t> asset_equity_;  // asset index -> equity row, -1 if absent
    std::vector<double> equity_open_;         // equity row * days + day, NaN if absent
    std::vector<double> equity_close_;

    std::string benchmark_;
    std::int32_t benchmark_row_ = -1;
    DataQualityReport quality_;
};

}  // namespace ovi
