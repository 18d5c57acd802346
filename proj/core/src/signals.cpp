#include "ovi/signals.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "ovi/csv.hpp"
#include "ovi/error.hpp"
#include "ovi/parallel.hpp"

namespace ovi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("filter: invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::string_view to_code(FlowKind k) noexcept {
    switch (k) {
        case FlowKind::Volume: return "volume";
        case FlowKind::Trades: return "trades";
        case FlowKind::NominalVolume: return "nominal";
    }
    return "?";
}

std::string_view to_code(SideRestriction s) noexcept {
    switch (s) {
        case SideRestriction::Both: return "both";
        case SideRestriction::BuyOnly: return "buy";
        case SideRestriction::SellOnly: return "sell";
    }
    return "?";
}

std::string_view to_code(IntentRestriction i) noexcept {
    switch (i) {
        case IntentRestriction::Both: return "both";
        case IntentRestriction::OpenOnly: return "open";
        case IntentRestriction::CloseOnly: return "close";
    }
    return "?";
}

std::string_view to_code(Feature f) noexcept {
    switch (f) {
        case Feature::Delta: return "delta";
        case Feature::Gamma: return "gamma";
        case Feature::Theta: return "theta";
        case Feature::Vega: return "vega";
        case Feature::Rho: return "rho";
        case Feature::Moneyness: return "moneyness";
        case Feature::Maturity: return "maturity";
        case Feature::ImpliedVol: return "iv";
    }
    return "?";
}

std::optional<Feature> feature_from_code(std::string_view code) noexcept {
    for (Feature f : {Feature::Delta, Feature::Gamma, Feature::Theta, Feature::Vega, Feature::Rho,
                      Feature::Moneyness, Feature::Maturity, Feature::ImpliedVol}) {
        if (to_code(f) == code) return f;
    }
    return std::nullopt;
}

void FilterSpec::validate() const {
    if (feature_bucket && (feature_bucket->bucket < 1 || feature_bucket->bucket > 4)) {
        throw ConfigError("filter: feature bucket must be in 1..4");
    }
    if (time_cutoff && (*time_cutoff < 1 || *time_cutoff > kSlotsPerDay)) {
        throw ConfigError("filter: time cutoff must be in 1.." + std::to_string(kSlotsPerDay));
    }
}

std::string FilterSpec::id() const {
    std::string out = "kind=" + std::string(to_code(flow_kind)) + ";side=" + std::string(to_code(side)) +
                      ";intent=" + std::string(to_code(intent)) + ";bucket=";
    if (feature_bucket) {
        out += std::string(to_code(feature_bucket->feature)) + ":" + std::to_string(feature_bucket->bucket);
    } else {
        out += "none";
    }
    out += ";exch=";
    if (exchanges.empty()) {
        out += "*";
    } else {
        std::vector<std::string> sorted = exchanges;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) out += (i ? "|" : "") + sorted[i];
    }
    out += ";t=" + (time_cutoff ? std::to_string(*time_cutoff) : std::string("*"));
    return out;
}

FilterSpec FilterSpec::parse(std::string_view text) {
    FilterSpec f;
    while (!text.empty()) {
        const std::size_t cut = text.find_first_of(",;");
        std::string_view item = trim(text.substr(0, cut));
        text = cut == std::string_view::npos ? std::string_view{} : text.substr(cut + 1);
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) throw ConfigError("filter: expected key=value, got '" + std::string(item) + "'");
        const std::string_view key = trim(item.substr(0, eq));
        const std::string_view val = trim(item.substr(eq + 1));
        if (key == "kind") {
            if (val == "volume") f.flow_kind = FlowKind::Volume;
            else if (val == "trades") f.flow_kind = FlowKind::Trades;
            else if (val == "nominal") f.flow_kind = FlowKind::NominalVolume;
            else throw ConfigError("filter: unknown kind '" + std::string(val) + "'");
        } else if (key == "side") {
            if (val == "both") f.side = SideRestriction::Both;
            else if (val == "buy") f.side = SideRestriction::BuyOnly;
            else if (val == "sell") f.side = SideRestriction::SellOnly;
            else throw ConfigError("filter: unknown side '" + std::string(val) + "'");
        } else if (key == "intent") {
            if (val == "both") f.intent = IntentRestriction::Both;
            else if (val == "open") f.intent = IntentRestriction::OpenOnly;
            else if (val == "close") f.intent = IntentRestriction::CloseOnly;
            else throw ConfigError("filter: unknown intent '" + std::string(val) + "'");
        } else if (key == "bucket") {
            if (val == "none") {
                f.feature_bucket.reset();
                continue;
            }
            const std::size_t colon = val.find(':');
            if (colon == std::string_view::npos) throw ConfigError("filter: bucket must be feature:n");
            auto feature = feature_from_code(val.substr(0, colon));
            if (!feature) throw ConfigError("filter: unknown feature '" + std::string(val.substr(0, colon)) + "'");
            f.feature_bucket = FeatureBucket{*feature, parse_int(val.substr(colon + 1), key)};
        } else if (key == "iv_bucket") {
            f.feature_bucket = FeatureBucket{Feature::ImpliedVol, parse_int(val, key)};
        } else if (key == "exch") {
            f.exchanges.clear();
            if (val == "*") continue;
            std::string_view rest = val;
            while (!rest.empty()) {
                const std::size_t bar = rest.find('|');
                std::string_view label = trim(rest.substr(0, bar));
                if (!label.empty()) f.exchanges.emplace_back(label);
                rest = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
            }
        } else if (key == "t") {
            if (val == "*") f.time_cutoff.reset();
            else f.time_cutoff = parse_int(val, key);
        } else {
            throw ConfigError("filter: unknown key '" + std::string(key) + "'");
        }
    }
    f.validate();
    return f;
}

double imbalance(const DirectionalFlows& f) noexcept {
    const double total = f.up + f.down;
    return total > 0.0 ? (f.up - f.down) / total : 0.0;
}

namespace {

struct ResolvedFilter {
    const FilterSpec* spec;
    std::vector<bool> exchange_ok;  // by ExchangeId
    int slot;
};

ResolvedFilter resolve(const MarketDataset& data, const FilterSpec& filter) {
    filter.validate();
    ResolvedFilter r{&filter, std::vector<bool>(data.exchanges().size(), filter.exchanges.empty()),
                     filter.time_cutoff.value_or(kSlotsPerDay)};
    for (const auto& label : filter.exchanges) {
        if (auto id = data.exchange_id(label)) r.exchange_ok[*id] = true;
    }
    return r;
}

bool intent_ok(IntentRestriction restriction, Intent intent) {
    switch (restriction) {
        case IntentRestriction::Both: return true;
        case IntentRestriction::OpenOnly: return intent == Intent::Open;
        case IntentRestriction::CloseOnly: return intent == Intent::Close;
    }
    return false;
}

/// Accumulates up/down flows for every MPC of one (asset, day) cell.
void cell_flows(const MarketDataset& data, AssetIndex asset, DayIndex day, const ResolvedFilter& rf,
                const FeatureBuckets* buckets, std::array<DirectionalFlows, kMpcCount>& out) {
    out.fill(DirectionalFlows{});
    const FilterSpec& f = *rf.spec;
    for (const FlowSeries& s : data.series(day, asset)) {
        if (!rf.exchange_ok[s.exchange]) continue;
        if (!intent_ok(f.intent, s.intent)) continue;
        if (f.feature_bucket && (buckets == nullptr || buckets->bucket_of(s.contract) != f.feature_bucket->bucket)) {
            continue;
        }
        const OptionSide option = data.contract(s.contract).option_side;
        // Up: call buys and put sells. Down: call sells and put buys.
        const bool is_up = (option == OptionSide::Call) == (s.side == TradeSide::Buy);
        if (f.side == SideRestriction::BuyOnly && s.side != TradeSide::Buy) continue;
        if (f.side == SideRestriction::SellOnly && s.side != TradeSide::Sell) continue;

        double q = 0.0;
        switch (f.flow_kind) {
            case FlowKind::Volume:
                q = static_cast<double>(data.volume_through(s, rf.slot));
                break;
            case FlowKind::Trades:
                q = static_cast<double>(data.trades_through(s, rf.slot));
                break;
            case FlowKind::NominalVolume: {
                const SummaryRecord* sum = data.summary(day, s.contract);
                q = sum ? static_cast<double>(data.volume_through(s, rf.slot)) * sum->mid_px() : 0.0;
                break;
            }
        }
        DirectionalFlows& cell = out[index(s.mpc)];
        (is_up ? cell.up : cell.down) += q;
    }
}

}  // namespace

DirectionalFlows directional_flows(const MarketDataset& data, AssetIndex asset, DayIndex day, Mpc mpc,
                                   const FilterSpec& filter, const FeatureBuckets* buckets) {
    if (asset >= data.asset_count() || day >= data.day_count()) {
        throw DimensionError("directional_flows: asset or day index out of range");
    }
    const ResolvedFilter rf = resolve(data, filter);
    std::array<DirectionalFlows, kMpcCount> flows;
    cell_flows(data, asset, day, rf, buckets, flows);
    return flows[index(mpc)];
}

DirectionalFlows directional_flows(const MarketDataset& data, AssetIndex asset, DayIndex day, Mpc mpc,
                                   const FilterSpec& filter, const FeatureOptions& options) {
    if (!filter.feature_bucket) return directional_flows(data, asset, day, mpc, filter, nullptr);
    const FeatureBuckets buckets = feature_buckets(data, day, filter.feature_bucket->feature, options);
    return directional_flows(data, asset, day, mpc, filter, &buckets);
}

Panel OviPanel::mpc_panel(Mpc m) const {
    Panel p(days, assets);
    const std::size_t n = days.size() * assets.size();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(index(m) * n), n, p.values.begin());
    return p;
}

OviPanel compute_ovi(const MarketDataset& data, const FilterSpec& filter, const FeatureOptions& options) {
    const ResolvedFilter rf = resolve(data, filter);
    OviPanel panel;
    panel.days = data.days();
    panel.assets = data.assets();
    panel.filter = filter;
    const std::size_t n_assets = data.asset_count();
    const std::size_t n_days = data.day_count();
    const std::size_t cells = kMpcCount * n_assets * n_days;
    panel.values.assign(cells, 0.0);
    panel.total_flow.assign(cells, 0.0);
    panel.zero_mask.assign(cells, 1);

    if (filter.intent != IntentRestriction::Both) {
        panel.warnings.push_back("intent restriction '" + std::string(to_code(filter.intent)) +
                                 "' leaves MarketMaker empty: market makers report no intent");
    }
    for (const auto& label : filter.exchanges) {
        if (!data.exchange_id(label)) panel.warnings.push_back("exchange '" + label + "' not present in dataset");
    }

    parallel_for(n_days, [&](std::size_t begin, std::size_t end) {
        std::array<DirectionalFlows, kMpcCount> flows;
        for (std::size_t d = begin; d < end; ++d) {
            const auto day = static_cast<DayIndex>(d);
            std::optional<FeatureBuckets> buckets;
            if (filter.feature_bucket) buckets = feature_buckets(data, day, filter.feature_bucket->feature, options);
            for (std::size_t a = 0; a < n_assets; ++a) {
                cell_flows(data, static_cast<AssetIndex>(a), day, rf, buckets ? &*buckets : nullptr, flows);
                for (Mpc m : kAllMpcs) {
                    const DirectionalFlows& f = flows[index(m)];
                    const std::size_t at = panel.offset(m, a, d);
                    const double total = f.up + f.down;
                    panel.total_flow[at] = total;
                    if (total > 0.0) {
                        panel.values[at] = imbalance(f);
                        panel.zero_mask[at] = 0;
                    }
                }
            }
        }
    });
    return panel;
}

OviPanel open_t_ovi(const MarketDataset& data, const FilterSpec& filter, const FeatureOptions& options) {
    if (!filter.time_cutoff) throw ConfigError("open_t_ovi: filter has no time cutoff");
    return compute_ovi(data, filter, options);
}

void write_ovi_csv(std::ostream& out, const OviPanel& panel, std::span<const Mpc> mpcs) {
    out << "date,asset,mpc,ovi,total_flow,filter_id\n";
    const std::string id = panel.filter.id();
    for (std::size_t d = 0; d < panel.days.size(); ++d) {
        const std::string date = panel.days[d].iso();
        for (std::size_t a = 0; a < panel.assets.size(); ++a) {
            for (Mpc m : mpcs) {
                const std::size_t at = panel.offset(m, a, d);
                out << date << ',' << panel.assets[a] << ',' << to_code(m) << ',' << format_double(panel.values[at])
                    << ',' << format_double(panel.total_flow[at]) << ',' << id << '\n';
            }
        }
    }
}

}  // namespace ovi
