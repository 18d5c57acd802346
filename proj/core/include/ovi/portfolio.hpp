#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovi/dataset.hpp"
#include "ovi/panel.hpp"
#include "ovi/returns.hpp"

namespace ovi {

/// Quintile bucket of every (asset, day) signal by |s|. Bucket 0 means a zero (or NaN) signal.
struct QuantileAssignment {
    std::size_t assets = 0;
    std::size_t days = 0;
    std::vector<std::uint8_t> bucket;  ///< asset-major, 0..5

    [[nodiscard]] int bucket_of(std::size_t asset, std::size_t day) const {
        return bucket[asset * days + day];
    }
    /// Group Qk = QBk u ... u QB5, so Q1 holds every nonzero signal and Q5 the strongest fifth.
    [[nodiscard]] bool in_group(std::size_t asset, std::size_t day, int group) const {
        const int b = bucket_of(asset, day);
        return b != 0 && b >= group;
    }
};

/// Per day, ranks nonzero |s| ascending (ties by asset index) and assigns QB = floor(5r/n) + 1
/// to the asset of 0-based rank r among n.
QuantileAssignment quantile_groups(const Panel& signals);

enum class BetKind : std::uint8_t { Uniform, Imbalance, Volume, NominalVolume, RelativeVolume, IvVolume };

std::string_view to_code(BetKind k) noexcept;
std::optional<BetKind> bet_kind_from_code(std::string_view code) noexcept;

struct LiquidityOptions {
    double rate = 0.0;    ///< risk-free rate for implied volatility
    double iv_cap = 2.0;  ///< IV-Volume uses log(1 + min(sigma, iv_cap))
};

/// Raw (unnormalized) liquidity bet sizes b' of one MPC, per (asset, day).
struct LiquidityPanel {
    Mpc mpc = Mpc::MarketMaker;
    Panel volume;           ///< log(1 + sum_j V_ij)
    Panel nominal_volume;   ///< log(1 + sum_j P_ij V_ij)
    Panel relative_volume;  ///< log(1 + sum_j V_ij / OI_ij), zero-OI contracts skipped
    Panel iv_volume;        ///< sum_j sum_m log(1 + min(sigma_ij, cap)) V_ijm, over all MPCs
    std::size_t zero_oi_skipped = 0;
    std::size_t iv_failures = 0;
};

LiquidityPanel compute_liquidity(const MarketDataset& data, Mpc mpc, const LiquidityOptions& options = {});

/// Normalized bet sizes of one day. `eligible[i]` selects the assets traded that day (nonzero
/// signal, in the group, finite return). Sizes sum to 1, or are all 0 when no raw size is
/// positive. Throws ConfigError when a liquidity scheme lacks its panel.
std::vector<double> bet_sizes(const Panel& signals, BetKind kind, std::size_t day,
                              std::span<const std::uint8_t> eligible, const LiquidityPanel* liquidity = nullptr);

struct BetEntry {
    std::uint32_t asset = 0;
    double weight = 0.0;
    double sign = 0.0;
    double ret = 0.0;
};

/// Daily P&L of a sign-following strategy. Entry d is the P&L of bets placed on day d.
struct PnlSeries {
    std::vector<Date> days;
    std::vector<double> daily;
    std::vector<double> gross;              ///< B_d, total bet size (1 on trading days, else 0)
    std::vector<std::uint32_t> n_assets;    ///< assets traded per day
    std::vector<std::uint32_t> bet_offsets; ///< per-day ranges into `bets` (size days + 1)
    std::vector<BetEntry> bets;
    std::string label;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return daily.size(); }
};

struct StrategySpec {
    BetKind scheme = BetKind::Uniform;
    int group = 1;  ///< Q1..Q5
};

/// P&L_d = sum_i b_id f_id sign(s_id) over group members with a finite return. Days with no
/// eligible asset contribute 0 and stay in the series, which has D - 1 entries.
PnlSeries pnl_series(const Panel& signals, const ReturnsPanel& returns, const StrategySpec& strategy,
                     const LiquidityPanel* liquidity = nullptr);

/// As pnl_series with the return of day d replaced by sum_{k=1..h} f^{CL_tmCL}_{d+k-1}. Sums
/// running past the last return day are truncated, with a warning.
PnlSeries holding_period_pnl(const Panel& signals, const MarketDataset& data, const StrategySpec& strategy,
                             int holding_days, ReturnBasis basis = ReturnBasis::ExcessMarket,
                             const LiquidityPanel* liquidity = nullptr);

}  // namespace ovi
