#include "ovi/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

#include "ovi/error.hpp"

namespace ovi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string describe_contract(const ContractKey& k) {
    std::ostringstream os;
    os << k.underlying << ' ' << to_code(k.option_side) << ' ' << k.strike << ' '
       << k.expiry.iso();
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// DatasetBuilder

DatasetBuilder::DatasetBuilder(DatasetOptions options) : options_(std::move(options)) {}

ContractId DatasetBuilder::intern_contract(const ContractKey& key) {
    auto [it, inserted] =
        contract_ids_.try_emplace(key, static_cast<ContractId>(contracts_.size()));
    if (inserted) {
        if (!(key.strike > 0.0)) {
            throw ValidationError("contract " + describe_contract(key) + ": strike must be > 0");
        }
        contracts_.push_back(key);
    }
    return it->second;
}

ExchangeId DatasetBuilder::intern_exchange(const std::string& label) {
    auto it = std::find(exchanges_.begin(), exchanges_.end(), label);
    if (it != exchanges_.end()) return static_cast<ExchangeId>(it - exchanges_.begin());
    exchanges_.push_back(label);
    return static_cast<ExchangeId>(exchanges_.size() - 1);
}

void DatasetBuilder::add_bucket(const VolumeBucket& b) {
    add_point(b.day, intern_contract(b.contract), intern_exchange(b.exchange), b.mpc,
              b.trade_side, b.intent, b.slot, b.cum_volume, b.cum_trades);
}

void DatasetBuilder::add_point(Date day, ContractId contract, ExchangeId exchange, Mpc mpc,
                               TradeSide side, Intent intent, int slot, std::int64_t cum_volume,
                               std::int64_t cum_trades) {
    if (slot < 1 || slot > kSlotsPerDay) {
        throw ValidationError("slot " + std::to_string(slot) + " outside 1.." +
                              std::to_string(kSlotsPerDay));
    }
    if (cum_volume < 0 || cum_trades < 0) {
        throw ValidationError("negative cumulative volume or trade count on " + day.iso());
    }
    if ((intent == Intent::Unspecified) != (mpc == Mpc::MarketMaker)) {
        throw ValidationError("intent must be NA exactly for market makers (" +
                              std::string(to_code(mpc)) + "/" + std::string(to_code(intent)) +
                              ")");
    }
    points_.push_back(RawPoint{day.days_since_epoch(), contract, exchange, mpc, side, intent,
                               static_cast<std::uint8_t>(slot), cum_volume, cum_trades});
}

void DatasetBuilder::add_summary(const DailyOptionSummary& s) {
    add_summary(s.day, SummaryRecord{intern_contract(s.contract), s.open_px, s.close_px, s.low_px,
                                     s.high_px, s.open_interest, s.total_volume});
}

void DatasetBuilder::add_summary(Date day, const SummaryRecord& r) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("summary " + describe_contract(contracts_.at(r.contract)) + " on " +
                              day.iso() + ": " + what);
    };
    const double lo = std::min(r.open_px, r.close_px);
    const double hi = std::max(r.open_px, r.close_px);
    if (!(r.low_px <= lo && hi <= r.high_px)) {
        fail("OHLC ordering violated (low <= open,close <= high)");
    }
    if (r.open_interest < 0) fail("negative open interest");
    if (r.total_volume < 0) fail("negative total volume");
    summaries_.push_back(RawSummary{day.days_since_epoch(), r});
}

void DatasetBuilder::add_equity(const EquityBar& bar) {
    if (!(bar.open_px > 0.0) || !(bar.close_px > 0.0)) {
        throw ValidationError("equity " + bar.asset + " on " + bar.day.iso() +
                              ": prices must be > 0");
    }
    equities_.push_back(bar);
}

MarketDataset DatasetBuilder::build() && {
    // Canonical ids: contracts and exchanges in sorted key order, independent of arrival order.
    {
        std::vector<ContractId> order(contracts_.size());
        std::iota(order.begin(), order.end(), ContractId{0});
        std::sort(order.begin(), order.end(), [&](ContractId a, ContractId b) { return contracts_[a] < contracts_[b]; });
        std::vector<ContractId> remap(contracts_.size());
        std::vector<ContractKey> sorted(contracts_.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            remap[order[k]] = static_cast<ContractId>(k);
            sorted[k] = contracts_[order[k]];
        }
        contracts_ = std::move(sorted);
        for (auto& [key, id] : contract_ids_) id = remap[id];
        for (auto& p : points_) p.contract = remap[p.contract];
        for (auto& s : summaries_) s.record.contract = remap[s.record.contract];
    }
    {
        std::vector<ExchangeId> order(exchanges_.size());
        std::iota(order.begin(), order.end(), ExchangeId{0});
        std::sort(order.begin(), order.end(), [&](ExchangeId a, ExchangeId b) { return exchanges_[a] < exchanges_[b]; });
        std::vector<ExchangeId> remap(exchanges_.size());
        std::vector<std::string> sorted(exchanges_.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            remap[order[k]] = static_cast<ExchangeId>(k);
            sorted[k] = exchanges_[order[k]];
        }
        exchanges_ = std::move(sorted);
        for (auto& p : points_) p.exchange = remap[p.exchange];
    }

    MarketDataset ds;
    ds.benchmark_ = options_.benchmark;
    ds.exchanges_ = exchanges_;
    if (ds.exchanges_.empty()) ds.exchanges_.push_back("");

    // Days: union over every record type.
    std::vector<std::int32_t> day_keys;
    day_keys.reserve(points_.size() / 8 + summaries_.size() + equities_.size());
    for (const auto& e : equities_) day_keys.push_back(e.day.days_since_epoch());
    for (const auto& s : summaries_) day_keys.push_back(s.day);
    {
        std::int32_t last = std::numeric_limits<std::int32_t>::min();
        for (const auto& p : points_) {
            if (p.day != last) day_keys.push_back(p.day);
            last = p.day;
        }
    }
    std::sort(day_keys.begin(), day_keys.end());
    day_keys.erase(std::unique(day_keys.begin(), day_keys.end()), day_keys.end());
    ds.days_.reserve(day_keys.size());
    for (auto k : day_keys) ds.days_.emplace_back(k);
    auto day_of = [&](std::int32_t key) {
        return static_cast<DayIndex>(std::lower_bound(day_keys.begin(), day_keys.end(), key) -
                                     day_keys.begin());
    };

    // Assets: underlyings of all interned contracts, lexicographic.
    for (const auto& c : contracts_) ds.assets_.push_back(c.underlying);
    std::sort(ds.assets_.begin(), ds.assets_.end());
    ds.assets_.erase(std::unique(ds.assets_.begin(), ds.assets_.end()), ds.assets_.end());
    ds.contracts_ = contracts_;
    ds.contract_asset_.resize(contracts_.size());
    for (std::size_t c = 0; c < contracts_.size(); ++c) {
        ds.contract_asset_[c] = *ds.asset_index(contracts_[c].underlying);
    }

    const std::size_t n_days = ds.days_.size();
    const std::size_t n_assets = ds.assets_.size();

    // Flow series.
    auto point_key = [&](const RawPoint& p) {
        return std::make_tuple(p.day, ds.contract_asset_[p.contract], p.contract, p.exchange,
                               p.mpc, p.side, p.intent, p.slot);
    };
    auto point_less = [&](const RawPoint& a, const RawPoint& b) {
        return point_key(a) < point_key(b);
    };
    if (!std::is_sorted(points_.begin(), points_.end(), point_less)) {
        std::stable_sort(points_.begin(), points_.end(), point_less);
    }

    ds.cell_offsets_.assign(n_days * n_assets + 1, 0);
    ds.points_.reserve(points_.size());
    auto same_series = [](const RawPoint& a, const RawPoint& b) {
        return a.day == b.day && a.contract == b.contract && a.exchange == b.exchange &&
               a.mpc == b.mpc && a.side == b.side && a.intent == b.intent;
    };
    auto series_key = [&](const RawPoint& p) {
        return "day=" + Date(p.day).iso() + " contract=" + describe_contract(contracts_[p.contract]) +
               " mpc=" + std::string(to_code(p.mpc)) + " side=" + std::string(to_code(p.side)) +
               " intent=" + std::string(to_code(p.intent)) + " exchange=" + ds.exchanges_[p.exchange];
    };

    for (std::size_t i = 0; i < points_.size();) {
        std::size_t j = i + 1;
        while (j < points_.size() && same_series(points_[i], points_[j])) ++j;

        FlowSeries s;
        const RawPoint& head = points_[i];
        s.contract = head.contract;
        s.exchange = head.exchange;
        s.mpc = head.mpc;
        s.side = head.side;
        s.intent = head.intent;
        s.first_point = static_cast<std::uint32_t>(ds.points_.size());
        s.point_count = static_cast<std::uint32_t>(j - i);

        bool clamped = false;
        for (std::size_t k = i; k < j; ++k) {
            const RawPoint& p = points_[k];
            if (k > i) {
                const RawPoint& q = points_[k - 1];
                if (p.slot == q.slot) {
                    throw ValidationError("duplicate slot " + std::to_string(p.slot) + " for " +
                                          series_key(p));
                }
                if (p.cum_volume < q.cum_volume || p.cum_trades < q.cum_trades) {
                    if (!options_.clamp_corrections) {
                        throw ValidationError("cumulative decrease at slot " +
                                              std::to_string(p.slot) + " for " + series_key(p));
                    }
                    if (p.cum_volume < q.cum_volume) ++ds.quality_.clamped_volume_decrements;
                    if (p.cum_trades < q.cum_trades) ++ds.quality_.clamped_trade_decrements;
                    clamped = true;
                }
            }
            ds.points_.push_back(SlotPoint{p.slot, p.cum_volume, p.cum_trades});
        }
        if (clamped && ds.quality_.clamped_keys.size() < 32) {
            ds.quality_.clamped_keys.push_back(series_key(head));
        }

        const std::size_t cell = static_cast<std::size_t>(day_of(head.day)) * n_assets +
                                 ds.contract_asset_[head.contract];
        ++ds.cell_offsets_[cell + 1];
        ds.series_.push_back(s);
        i = j;
    }
    std::partial_sum(ds.cell_offsets_.begin(), ds.cell_offsets_.end(), ds.cell_offsets_.begin());
    points_.clear();
    points_.shrink_to_fit();

    // Summaries.
    std::sort(summaries_.begin(), summaries_.end(), [](const RawSummary& a, const RawSummary& b) {
        return std::tie(a.day, a.record.contract) < std::tie(b.day, b.record.contract);
    });
    ds.summary_offsets_.assign(n_days + 1, 0);
    ds.summaries_.reserve(summaries_.size());
    for (std::size_t i = 0; i < summaries_.size(); ++i) {
        if (i > 0 && summaries_[i].day == summaries_[i - 1].day &&
            summaries_[i].record.contract == summaries_[i - 1].record.contract) {
            throw ValidationError("duplicate daily summary for " +
                                  describe_contract(contracts_[summaries_[i].record.contract]) +
                                  " on " + Date(summaries_[i].day).iso());
        }
        ds.summaries_.push_back(summaries_[i].record);
        ++ds.summary_offsets_[day_of(summaries_[i].day) + 1];
    }
    std::partial_sum(ds.summary_offsets_.begin(), ds.summary_offsets_.end(),
                     ds.summary_offsets_.begin());

    for (DayIndex d = 0; d < n_days; ++d) {
        for (AssetIndex a = 0; a < n_assets; ++a) {
            for (const FlowSeries& s : ds.series(d, a)) {
                if (ds.summary(d, s.contract) == nullptr) {
                    throw ValidationError("no daily summary for " +
                                          describe_contract(contracts_[s.contract]) + " on " +
                                          ds.days_[d].iso());
                }
            }
        }
    }

    // Equities.
    std::sort(equities_.begin(), equities_.end(), [](const EquityBar& a, const EquityBar& b) {
        return std::tie(a.asset, a.day) < std::tie(b.asset, b.day);
    });
    for (std::size_t i = 0; i < equities_.size(); ++i) {
        if (i > 0 && equities_[i].asset == equities_[i - 1].asset &&
            equities_[i].day == equities_[i - 1].day) {
            throw ValidationError("duplicate equity bar for " + equities_[i].asset + " on " +
                                  equities_[i].day.iso());
        }
        if (ds.equity_ids_.empty() || ds.equity_ids_.back() != equities_[i].asset) {
            ds.equity_ids_.push_back(equities_[i].asset);
        }
    }
    ds.equity_open_.assign(ds.equity_ids_.size() * n_days, kNaN);
    ds.equity_close_.assign(ds.equity_ids_.size() * n_days, kNaN);
    {
        std::size_t row = 0;
        for (std::size_t i = 0; i < equities_.size(); ++i) {
            if (i > 0 && equities_[i].asset != equities_[i - 1].asset) ++row;
            const std::size_t at = row * n_days + day_of(equities_[i].day.days_since_epoch());
            ds.equity_open_[at] = equities_[i].open_px;
            ds.equity_close_[at] = equities_[i].close_px;
        }
    }
    ds.asset_equity_.assign(n_assets, -1);
    for (AssetIndex a = 0; a < n_assets; ++a) {
        auto it = std::lower_bound(ds.equity_ids_.begin(), ds.equity_ids_.end(), ds.assets_[a]);
        if (it != ds.equity_ids_.end() && *it == ds.assets_[a]) {
            ds.asset_equity_[a] = static_cast<std::int32_t>(it - ds.equity_ids_.begin());
        }
    }
    {
        auto it = std::lower_bound(ds.equity_ids_.begin(), ds.equity_ids_.end(), ds.benchmark_);
        if (it != ds.equity_ids_.end() && *it == ds.benchmark_) {
            ds.benchmark_row_ = static_cast<std::int32_t>(it - ds.equity_ids_.begin());
        }
    }
    for (DayIndex d = 0; d < n_days; ++d) {
        for (AssetIndex a = 0; a < n_assets; ++a) {
            if (!ds.series(d, a).empty() && !ds.equity(a, d)) {
                throw ValidationError("asset " + ds.assets_[a] + " has option flow but no equity bar on " +
                                      ds.days_[d].iso());
            }
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------------------------
// MarketDataset

std::optional<AssetIndex> MarketDataset::asset_index(const std::string& id) const {
    auto it = std::lower_bound(assets_.begin(), assets_.end(), id);
    if (it == assets_.end() || *it != id) return std::nullopt;
    return static_cast<AssetIndex>(it - assets_.begin());
}

std::optional<DayIndex> MarketDataset::day_index(Date day) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), day);
    if (it == days_.end() || *it != day) return std::nullopt;
    return static_cast<DayIndex>(it - days_.begin());
}

std::optional<ExchangeId> MarketDataset::exchange_id(const std::string& label) const {
    auto it = std::find(exchanges_.begin(), exchanges_.end(), label);
    if (it == exchanges_.end()) return std::nullopt;
    return static_cast<ExchangeId>(it - exchanges_.begin());
}

std::span<const FlowSeries> MarketDataset::series(DayIndex day, AssetIndex asset) const {
    const std::size_t cell = static_cast<std::size_t>(day) * assets_.size() + asset;
    if (cell + 1 >= cell_offsets_.size()) return {};
    return {series_.data() + cell_offsets_[cell], cell_offsets_[cell + 1] - cell_offsets_[cell]};
}

std::span<const SlotPoint> MarketDataset::points(const FlowSeries& s) const {
    return {points_.data() + s.first_point, s.point_count};
}

std::int64_t MarketDataset::clean_through(const FlowSeries& s, int slot, bool trades) const {
    std::int64_t total = 0;
    std::int64_t prev = 0;
    for (const SlotPoint& p : points(s)) {
        if (p.slot > slot) break;
        const std::int64_t cur = trades ? p.cum_trades : p.cum_volume;
        if (cur > prev) total += cur - prev;
        prev = cur;
    }
    return total;
}

std::int64_t MarketDataset::volume_through(const FlowSeries& s, int slot) const {
    return clean_through(s, slot, false);
}

std::int64_t MarketDataset::trades_through(const FlowSeries& s, int slot) const {
    return clean_through(s, slot, true);
}

void MarketDataset::window_volumes(const FlowSeries& s, std::span<double, kSlotsPerDay> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    std::int64_t prev = 0;
    for (const SlotPoint& p : points(s)) {
        if (p.cum_volume > prev) out[p.slot - 1] += static_cast<double>(p.cum_volume - prev);
        prev = p.cum_volume;
    }
}

std::span<const SummaryRecord> MarketDataset::summaries(DayIndex day) const {
    if (day + 1 >= summary_offsets_.size()) return {};
    return {summaries_.data() + summary_offsets_[day],
            summary_offsets_[day + 1] - summary_offsets_[day]};
}

const SummaryRecord* MarketDataset::summary(DayIndex day, ContractId contract) const {
    auto span = summaries(day);
    auto it = std::lower_bound(span.begin(), span.end(), contract,
                               [](const SummaryRecord& r, ContractId c) { return r.contract < c; });
    if (it == span.end() || it->contract != contract) return nullptr;
    return &*it;
}

std::optional<EquityQuote> MarketDataset::equity(AssetIndex asset, DayIndex day) const {
    if (asset >= asset_equity_.size() || asset_equity_[asset] < 0 || day >= days_.size()) {
        return std::nullopt;
    }
    const std::size_t at = static_cast<std::size_t>(asset_equity_[asset]) * days_.size() + day;
    if (std::isnan(equity_open_[at])) return std::nullopt;
    return EquityQuote{equity_open_[at], equity_close_[at]};
}

std::optional<EquityQuote> MarketDataset::equity(const std::string& id, DayIndex day) const {
    auto it = std::lower_bound(equity_ids_.begin(), equity_ids_.end(), id);
    if (it == equity_ids_.end() || *it != id || day >= days_.size()) return std::nullopt;
    const std::size_t at = static_cast<std::size_t>(it - equity_ids_.begin()) * days_.size() + day;
    if (std::isnan(equity_open_[at])) return std::nullopt;
    return EquityQuote{equity_open_[at], equity_close_[at]};
}

std::optional<EquityQuote> MarketDataset::benchmark_quote(DayIndex day) const {
    if (benchmark_row_ < 0 || day >= days_.size()) return std::nullopt;
    const std::size_t at = static_cast<std::size_t>(benchmark_row_) * days_.size() + day;
    if (std::isnan(equity_open_[at])) return std::nullopt;
    return EquityQuote{equity_open_[at], equity_close_[at]};
}

bool MarketDataset::has_full_benchmark() const {
    for (DayIndex d = 0; d < days_.size(); ++d) {
        if (!benchmark_quote(d)) return false;
    }
    return !days_.empty();
}

std::vector<VolumeBucket> MarketDataset::buckets() const {
    std::vector<VolumeBucket> out;
    out.reserve(points_.size());
    for (DayIndex d = 0; d < days_.size(); ++d) {
        for (AssetIndex a = 0; a < assets_.size(); ++a) {
            for (const FlowSeries& s : series(d, a)) {
                for (const SlotPoint& p : points(s)) {
                    out.push_back(VolumeBucket{days_[d], p.slot, contracts_[s.contract], s.mpc,
                                               s.side, s.intent, p.cum_volume, p.cum_trades,
                                               exchanges_[s.exchange]});
                }
            }
        }
    }
    return out;
}

std::vector<DailyOptionSummary> MarketDataset::daily_summaries() const {
    std::vector<DailyOptionSummary> out;
    out.reserve(summaries_.size());
    for (DayIndex d = 0; d < days_.size(); ++d) {
        for (const SummaryRecord& r : summaries(d)) {
            out.push_back(DailyOptionSummary{days_[d], contracts_[r.contract], r.open_px,
                                             r.close_px, r.low_px, r.high_px, r.open_interest,
                                             r.total_volume});
        }
    }
    return out;
}

std::vector<EquityBar> MarketDataset::equity_bars() const {
    std::vector<EquityBar> out;
    for (std::size_t row = 0; row < equity_ids_.size(); ++row) {
        for (DayIndex d = 0; d < days_.size(); ++d) {
            const std::size_t at = row * days_.size() + d;
            if (std::isnan(equity_open_[at])) continue;
            out.push_back(EquityBar{equity_ids_[row], days_[d], equity_open_[at], equity_close_[at]});
        }
    }
    return out;
}

}  // namespace ovi
