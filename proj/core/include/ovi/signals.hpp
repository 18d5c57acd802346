#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovi/dataset.hpp"
#include "ovi/panel.hpp"

namespace ovi {

enum class FlowKind : std::uint8_t { Volume, Trades, NominalVolume };
enum class SideRestriction : std::uint8_t { Both, BuyOnly, SellOnly };
enum class IntentRestriction : std::uint8_t { Both, OpenOnly, CloseOnly };
enum class Feature : std::uint8_t { Delta, Gamma, Theta, Vega, Rho, Moneyness, Maturity, ImpliedVol };

std::string_view to_code(FlowKind k) noexcept;
std::string_view to_code(SideRestriction s) noexcept;
std::string_view to_code(IntentRestriction i) noexcept;
std::string_view to_code(Feature f) noexcept;
std::optional<Feature> feature_from_code(std::string_view code) noexcept;

struct FeatureBucket {
    Feature feature = Feature::ImpliedVol;
    int bucket = 1;  ///< 1 (lowest quartile) .. 4 (highest)

    bool operator==(const FeatureBucket&) const = default;
};

/// Restrictions applied when aggregating flow into an imbalance.
struct FilterSpec {
    FlowKind flow_kind = FlowKind::Volume;
    SideRestriction side = SideRestriction::Both;
    IntentRestriction intent = IntentRestriction::Both;
    std::optional<FeatureBucket> feature_bucket;
    /// Exchange labels to include; empty means all.
    std::vector<std::string> exchanges;
    /// Read cumulative flow through this slot instead of the close.
    std::optional<int> time_cutoff;

    /// Throws ConfigError when a field is out of range.
    void validate() const;

    /// Canonical text form, e.g. "kind=volume;side=both;intent=both;bucket=iv:4;exch=*;t=39".
    [[nodiscard]] std::string id() const;

    /// Parses a comma- or semicolon-separated list of key=value pairs. Keys: kind, side, intent,
    /// bucket (feature:n), iv_bucket (n, shorthand for bucket=iv:n), exch (label|label or *), t.
    static FilterSpec parse(std::string_view text);

    bool operator==(const FilterSpec&) const = default;
};

struct DirectionalFlows {
    double up = 0.0;    ///< call buys + put sells
    double down = 0.0;  ///< call sells + put buys
};

/// Inputs for per-contract Black-Scholes features.
struct FeatureOptions {
    double rate = 0.0;
    /// Quartiles per underlying instead of across the whole market on each day.
    bool per_asset = false;
};

/// Quartile bucket of every contract traded on one day.
struct FeatureBuckets {
    std::vector<ContractId> contracts;   ///< sorted
    std::vector<std::uint8_t> bucket;    ///< 1..4, or 0 when the contract is excluded
    /// Contracts excluded because the feature could not be computed (failed IV, missing spot,
    /// expired contract).
    std::size_t excluded = 0;
    std::size_t iv_failures = 0;
    /// Set when some quartile split had fewer than four contracts; those all land in bucket 1.
    bool degenerate = false;

    /// 0 for unknown or excluded contracts.
    [[nodiscard]] int bucket_of(ContractId id) const;
};

/// Assigns quartile buckets from raw feature values. NaN values are excluded (bucket 0).
/// Bucket k holds values above the ceil((k-1)n/4)-th and at most the ceil(kn/4)-th order
/// statistic, so ties on a boundary fall to the lower bucket.
std::vector<std::uint8_t> quartile_buckets(std::span<const double> values, bool* degenerate = nullptr);

/// Feature value of a contract on a day, or NaN when it cannot be computed.
struct ContractFeature {
    ContractId contract = 0;
    double value = kNaN;
    bool iv_failed = false;
};
std::vector<ContractFeature> contract_features(const MarketDataset& data, DayIndex day, Feature feature,
                                               const FeatureOptions& options = {});

FeatureBuckets feature_buckets(const MarketDataset& data, DayIndex day, Feature feature,
                               const FeatureOptions& options = {});

/// Up/down flow of one (asset, day, MPC) cell. `buckets` must be the feature buckets of `day`
/// when the filter has a feature restriction.
DirectionalFlows directional_flows(const MarketDataset& data, AssetIndex asset, DayIndex day, Mpc mpc,
                                   const FilterSpec& filter, const FeatureBuckets* buckets = nullptr);
/// Convenience overload that computes the day's feature buckets itself.
DirectionalFlows directional_flows(const MarketDataset& data, AssetIndex asset, DayIndex day, Mpc mpc,
                                   const FilterSpec& filter, const FeatureOptions& options);

/// (up - down) / (up + down), with 0/0 = 0.
[[nodiscard]] double imbalance(const DirectionalFlows& f) noexcept;

/// Asset x day x MPC imbalance panel.
struct OviPanel {
    std::vector<Date> days;
    std::vector<std::string> assets;
    FilterSpec filter;
    std::vector<double> values;       ///< index ((mpc * assets) + asset) * days + day
    std::vector<double> total_flow;   ///< up + down, same layout
    std::vector<std::uint8_t> zero_mask;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t offset(Mpc m, std::size_t asset, std::size_t day) const noexcept {
        return (index(m) * assets.size() + asset) * days.size() + day;
    }
    [[nodiscard]] double value(Mpc m, std::size_t asset, std::size_t day) const {
        return values[offset(m, asset, day)];
    }
    /// Asset x day signal matrix of one MPC.
    [[nodiscard]] Panel mpc_panel(Mpc m) const;
};

OviPanel compute_ovi(const MarketDataset& data, const FilterSpec& filter,
                     const FeatureOptions& options = {});

/// compute_ovi with flows read through `filter.time_cutoff`; throws ConfigError if it is unset.
OviPanel open_t_ovi(const MarketDataset& data, const FilterSpec& filter,
                    const FeatureOptions& options = {});

/// Writes `date,asset,mpc,ovi,total_flow,filter_id`, one row per (day, asset, mpc).
void write_ovi_csv(std::ostream& out, const OviPanel& panel, std::span<const Mpc> mpcs);

}  // namespace ovi
