#include "ovi/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ovi/error.hpp"
#include "ovi/pricing.hpp"

namespace ovi {

namespace {

double signal_at(const Panel& s, std::size_t a, std::size_t d) {
    const double v = s(a, d);
    return std::isnan(v) ? 0.0 : v;
}

}  // namespace

QuantileAssignment quantile_groups(const Panel& signals) {
    QuantileAssignment qa;
    qa.assets = signals.asset_count();
    qa.days = signals.day_count();
    qa.bucket.assign(qa.assets * qa.days, 0);
    std::vector<std::size_t> order;
    for (std::size_t d = 0; d < qa.days; ++d) {
        order.clear();
        for (std::size_t a = 0; a < qa.assets; ++a) {
            if (signal_at(signals, a, d) != 0.0) order.push_back(a);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return std::abs(signals(x, d)) < std::abs(signals(y, d));
        });
        const std::size_t n = order.size();
        for (std::size_t r = 0; r < n; ++r) {
            qa.bucket[order[r] * qa.days + d] = static_cast<std::uint8_t>(5 * r / n + 1);
        }
    }
    return qa;
}

std::string_view to_code(BetKind k) noexcept {
    switch (k) {
        case BetKind::Uniform: return "uniform";
        case BetKind::Imbalance: return "imbalance";
        case BetKind::Volume: return "volume";
        case BetKind::NominalVolume: return "nominal_volume";
        case BetKind::RelativeVolume: return "relative_volume";
        case BetKind::IvVolume: return "iv_volume";
    }
    return "?";
}

std::optional<BetKind> bet_kind_from_code(std::string_view code) noexcept {
    for (BetKind k : {BetKind::Uniform, BetKind::Imbalance, BetKind::Volume, BetKind::NominalVolume,
                      BetKind::RelativeVolume, BetKind::IvVolume}) {
        if (to_code(k) == code) return k;
    }
    return std::nullopt;
}

LiquidityPanel compute_liquidity(const MarketDataset& data, Mpc mpc, const LiquidityOptions& options) {
    LiquidityPanel lp;
    lp.mpc = mpc;
    lp.volume = Panel(data.days(), data.assets());
    lp.nominal_volume = Panel(data.days(), data.assets());
    lp.relative_volume = Panel(data.days(), data.assets());
    lp.iv_volume = Panel(data.days(), data.assets());

    for (DayIndex d = 0; d < data.day_count(); ++d) {
        const Date date = data.days()[d];
        for (AssetIndex a = 0; a < data.asset_count(); ++a) {
            const auto series = data.series(d, a);
            if (series.empty()) continue;
            const auto quote = data.equity(a, d);
            double vol = 0.0, nominal = 0.0, relative = 0.0, iv_vol = 0.0;
            // Series are sorted by contract, so each contract's flow is a contiguous run.
            for (std::size_t i = 0; i < series.size();) {
                const ContractId c = series[i].contract;
                double v_mpc = 0.0, v_all = 0.0;
                for (; i < series.size() && series[i].contract == c; ++i) {
                    const double v = static_cast<double>(data.volume_through(series[i]));
                    v_all += v;
                    if (series[i].mpc == mpc) v_mpc += v;
                }
                const SummaryRecord* sum = data.summary(d, c);
                if (v_mpc > 0.0) {
                    vol += v_mpc;
                    if (sum) nominal += sum->mid_px() * v_mpc;
                    if (sum && sum->open_interest > 0) {
                        relative += v_mpc / static_cast<double>(sum->open_interest);
                    } else {
                        ++lp.zero_oi_skipped;
                    }
                }
                if (v_all > 0.0) {
                    const ContractKey& key = data.contract(c);
                    const double tau = static_cast<double>(key.expiry - date) / 365.0;
                    bool ok = false;
                    if (sum && quote && tau > 0.0) {
                        try {
                            BsInputs in{0.5 * (quote->open_px + quote->close_px), key.strike, tau, options.rate,
                                        0.0, key.option_side};
                            const double sigma = implied_volatility(sum->mid_px(), in).sigma;
                            iv_vol += std::log1p(std::min(sigma, options.iv_cap)) * v_all;
                            ok = true;
                        } catch (const Error&) {
                        }
                    }
                    if (!ok) ++lp.iv_failures;
                }
            }
            lp.volume(a, d) = std::log1p(vol);
            lp.nominal_volume(a, d) = std::log1p(nominal);
            lp.relative_volume(a, d) = std::log1p(relative);
            lp.iv_volume(a, d) = iv_vol;
        }
    }
    return lp;
}

std::vector<double> bet_sizes(const Panel& signals, BetKind kind, std::size_t day,
                              std::span<const std::uint8_t> eligible, const LiquidityPanel* liquidity) {
    const std::size_t n = signals.asset_count();
    if (eligible.size() != n || day >= signals.day_count()) {
        throw DimensionError("bet_sizes: eligibility mask or day does not match the signal panel");
    }
    const Panel* raw = nullptr;
    switch (kind) {
        case BetKind::Uniform:
        case BetKind::Imbalance: break;
        case BetKind::Volume: raw = liquidity ? &liquidity->volume : nullptr; break;
        case BetKind::NominalVolume: raw = liquidity ? &liquidity->nominal_volume : nullptr; break;
        case BetKind::RelativeVolume: raw = liquidity ? &liquidity->relative_volume : nullptr; break;
        case BetKind::IvVolume: raw = liquidity ? &liquidity->iv_volume : nullptr; break;
    }
    if (kind != BetKind::Uniform && kind != BetKind::Imbalance) {
        if (raw == nullptr) throw ConfigError("bet scheme '" + std::string(to_code(kind)) + "' needs a liquidity panel");
        if (!raw->aligned_with(signals)) throw DimensionError("liquidity panel is not aligned with the signals");
    }
    std::vector<double> b(n, 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        if (!eligible[a]) continue;
        double w = 1.0;
        if (kind == BetKind::Imbalance) w = std::abs(signal_at(signals, a, day));
        else if (raw) w = (*raw)(a, day);
        if (!(w > 0.0)) w = 0.0;
        b[a] = w;
        total += w;
    }
    if (total > 0.0) {
        for (double& w : b) w /= total;
    }
    return b;
}

namespace {

PnlSeries pnl_from_panel(const Panel& signals, const Panel& returns, const StrategySpec& strategy,
                         const LiquidityPanel* liquidity) {
    if (!signals.aligned_with(returns)) throw DimensionError("signals and returns panels are not aligned");
    if (strategy.group < 1 || strategy.group > 5) throw ConfigError("quantile group must be in 1..5");
    const std::size_t n = signals.asset_count();
    const std::size_t n_days = signals.day_count();
    if (n_days < 2) throw DimensionError("P&L needs at least two days");
    const QuantileAssignment qa = quantile_groups(signals);

    PnlSeries p;
    const std::size_t len = n_days - 1;
    p.days.assign(signals.days.begin(), signals.days.begin() + static_cast<std::ptrdiff_t>(len));
    p.daily.assign(len, 0.0);
    p.gross.assign(len, 0.0);
    p.n_assets.assign(len, 0);
    p.bet_offsets.assign(len + 1, 0);
    std::vector<std::uint8_t> eligible(n);
    for (std::size_t d = 0; d < len; ++d) {
        for (std::size_t a = 0; a < n; ++a) {
            eligible[a] = qa.in_group(a, d, strategy.group) && std::isfinite(returns(a, d)) ? 1 : 0;
        }
        const std::vector<double> b = bet_sizes(signals, strategy.scheme, d, eligible, liquidity);
        double pnl = 0.0, gross = 0.0;
        std::uint32_t count = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (b[a] <= 0.0) continue;
            const double sign = signals(a, d) > 0.0 ? 1.0 : -1.0;
            pnl += b[a] * returns(a, d) * sign;
            gross += b[a];
            ++count;
            p.bets.push_back(BetEntry{static_cast<std::uint32_t>(a), b[a], sign, returns(a, d)});
        }
        p.daily[d] = pnl;
        p.gross[d] = count > 0 ? gross : 0.0;
        p.n_assets[d] = count;
        p.bet_offsets[d + 1] = static_cast<std::uint32_t>(p.bets.size());
    }
    return p;
}

}  // namespace

PnlSeries pnl_series(const Panel& signals, const ReturnsPanel& returns, const StrategySpec& strategy,
                     const LiquidityPanel* liquidity) {
    PnlSeries p = pnl_from_panel(signals, returns.values, strategy, liquidity);
    p.label = "group=Q" + std::to_string(strategy.group) + ";scheme=" + std::string(to_code(strategy.scheme)) +
              ";mode=" + returns.mode.id();
    return p;
}

PnlSeries holding_period_pnl(const Panel& signals, const MarketDataset& data, const StrategySpec& strategy,
                             int holding_days, ReturnBasis basis, const LiquidityPanel* liquidity) {
    if (holding_days < 1) throw ConfigError("holding period must be >= 1 day");
    const ReturnsPanel daily = compute_returns(data, ReturnMode{ReturnSpan::CL_tmCL, basis});
    const std::size_t n_days = daily.values.day_count();
    Panel summed(daily.values.days, daily.values.assets, kNaN);
    bool truncated = false;
    for (std::size_t a = 0; a < summed.asset_count(); ++a) {
        for (std::size_t d = 0; d + 1 < n_days; ++d) {
            double total = 0.0;
            for (int k = 0; k < holding_days; ++k) {
                const std::size_t t = d + static_cast<std::size_t>(k);
                if (t + 1 >= n_days) {
                    truncated = true;
                    break;
                }
                total += daily.values(a, t);  // NaN propagates and drops the asset
            }
            summed(a, d) = total;
        }
    }
    PnlSeries p = pnl_from_panel(signals, summed, strategy, liquidity);
    p.label = "group=Q" + std::to_string(strategy.group) + ";scheme=" + std::string(to_code(strategy.scheme)) +
              ";mode=" + ReturnMode{ReturnSpan::CL_tmCL, basis}.id() + ";h=" + std::to_string(holding_days);
    if (truncated) {
        p.warnings.push_back("holding period of " + std::to_string(holding_days) +
                             " days truncated at the end of the sample");
    }
    return p;
}

}  // namespace ovi
