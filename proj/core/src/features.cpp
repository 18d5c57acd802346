#include "ovi/signals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "ovi/error.hpp"
#include "ovi/pricing.hpp"

namespace ovi {

int FeatureBuckets::bucket_of(ContractId id) const {
    auto it = std::lower_bound(contracts.begin(), contracts.end(), id);
    if (it == contracts.end() || *it != id) return 0;
    return bucket[static_cast<std::size_t>(it - contracts.begin())];
}

std::vector<std::uint8_t> quartile_buckets(std::span<const double> values, bool* degenerate) {
    std::vector<std::uint8_t> out(values.size(), 0);
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (double v : values) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    const std::size_t n = sorted.size();
    if (n < 4) {
        if (degenerate && n > 0) *degenerate = true;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isnan(values[i])) out[i] = 1;
        }
        return out;
    }
    std::sort(sorted.begin(), sorted.end());
    std::array<double, 3> q{};
    for (std::size_t k = 1; k <= 3; ++k) {
        const std::size_t rank = (k * n + 3) / 4;  // ceil(k n / 4), 1-based
        q[k - 1] = sorted[rank - 1];
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v)) continue;
        int b = 1;
        for (double t : q) b += v > t ? 1 : 0;
        out[i] = static_cast<std::uint8_t>(b);
    }
    return out;
}

std::vector<ContractFeature> contract_features(const MarketDataset& data, DayIndex day, Feature feature,
                                               const FeatureOptions& options) {
    if (day >= data.day_count()) throw DimensionError("contract_features: day index out of range");
    const Date date = data.days()[day];

    // Traded contracts: positive reported daily volume or any reported flow.
    std::vector<ContractId> traded;
    for (const SummaryRecord& s : data.summaries(day)) {
        if (s.total_volume > 0) traded.push_back(s.contract);
    }
    for (AssetIndex a = 0; a < data.asset_count(); ++a) {
        for (const FlowSeries& s : data.series(day, a)) {
            if (traded.empty() || traded.back() != s.contract) traded.push_back(s.contract);
        }
    }
    std::sort(traded.begin(), traded.end());
    traded.erase(std::unique(traded.begin(), traded.end()), traded.end());

    std::vector<ContractFeature> out;
    out.reserve(traded.size());
    for (ContractId id : traded) {
        ContractFeature cf{id, kNaN, false};
        const ContractKey& key = data.contract(id);
        const double tau = static_cast<double>(key.expiry - date) / 365.0;
        const SummaryRecord* summary = data.summary(day, id);
        const auto quote = data.equity(data.contract_asset(id), day);
        if (!(tau > 0.0) || summary == nullptr || !quote) {
            out.push_back(cf);
            continue;
        }
        if (feature == Feature::Maturity) {
            cf.value = tau;
            out.push_back(cf);
            continue;
        }
        BsInputs in{0.5 * (quote->open_px + quote->close_px), key.strike, tau, options.rate, 0.0, key.option_side};
        try {
            in.sigma = implied_volatility(summary->mid_px(), in).sigma;
        } catch (const Error&) {
            cf.iv_failed = true;
            out.push_back(cf);
            continue;
        }
        switch (feature) {
            case Feature::ImpliedVol: cf.value = in.sigma; break;
            case Feature::Moneyness: cf.value = standardized_moneyness(in); break;
            default: {
                const GreeksResult g = bs_greeks(in);
                switch (feature) {
                    case Feature::Delta: cf.value = g.delta; break;
                    case Feature::Gamma: cf.value = g.gamma; break;
                    case Feature::Theta: cf.value = g.theta; break;
                    case Feature::Vega: cf.value = g.vega; break;
                    case Feature::Rho: cf.value = g.rho; break;
                    default: break;
                }
            }
        }
        out.push_back(cf);
    }
    return out;
}

FeatureBuckets feature_buckets(const MarketDataset& data, DayIndex day, Feature feature,
                               const FeatureOptions& options) {
    const std::vector<ContractFeature> features = contract_features(data, day, feature, options);
    FeatureBuckets fb;
    fb.contracts.reserve(features.size());
    fb.bucket.assign(features.size(), 0);
    std::vector<double> values(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        fb.contracts.push_back(features[i].contract);
        values[i] = features[i].value;
        if (std::isnan(values[i])) ++fb.excluded;
        if (features[i].iv_failed) ++fb.iv_failures;
    }
    if (!options.per_asset) {
        fb.bucket = quartile_buckets(values, &fb.degenerate);
        return fb;
    }
    std::map<AssetIndex, std::vector<std::size_t>> by_asset;
    for (std::size_t i = 0; i < features.size(); ++i) by_asset[data.contract_asset(features[i].contract)].push_back(i);
    for (const auto& [asset, rows] : by_asset) {
        std::vector<double> sub(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) sub[k] = values[rows[k]];
        const auto b = quartile_buckets(sub, &fb.degenerate);
        for (std::size_t k = 0; k < rows.size(); ++k) fb.bucket[rows[k]] = b[k];
    }
    return fb;
}

}  // namespace ovi
