#include "ovi/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ovi/error.hpp"
#include "ovi/pricing.hpp"
#include "ovi/random.hpp"

namespace ovi {

namespace {

bool is_weekend(Date d) {
    const int wd = static_cast<int>(((d.days_since_epoch() + 4) % 7 + 7) % 7);  // 0 = Sunday
    return wd == 0 || wd == 6;
}

std::vector<Date> business_days(Date start, std::size_t n) {
    std::vector<Date> out;
    out.reserve(n);
    for (Date d = start; out.size() < n; d = d + 1) {
        if (!is_weekend(d)) out.push_back(d);
    }
    return out;
}

double beta_symmetric(Rng& rng, double shape) {
    std::gamma_distribution<double> gamma(shape, 1.0);
    const double x = gamma(rng);
    const double y = gamma(rng);
    return x + y > 0.0 ? x / (x + y) : 0.5;
}

struct Listing {
    ContractId id;
    OptionSide side;
    double strike;
    Date expiry;
};

struct LegFill {
    int slot;
    std::int64_t cum_volume;
    std::int64_t cum_trades;
};

}  // namespace

std::string synthetic_asset_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "A%04zu", i);
    return buf;
}

void SynthConfig::validate() const {
    if (assets < 2 || days < 2) throw ConfigError("synthetic market needs at least 2 assets and 2 days");
    if (assets > 10000) throw ConfigError("synthetic market supports at most 10000 assets");
    for (double r : rho) {
        if (!(r >= -1.0 && r <= 1.0)) throw ConfigError("planted correlation must lie in [-1, 1]");
    }
    if (mpcs.empty()) throw ConfigError("synthetic market needs at least one MPC");
    if (!(base_volume >= 1.0)) throw ConfigError("base_volume must be >= 1");
    if (!(ovi_shape > 0.0)) throw ConfigError("ovi_shape must be > 0");
    if (!(min_abs_ovi >= 0.0 && min_abs_ovi <= 1.0)) throw ConfigError("min_abs_ovi must lie in [0, 1]");
    if (!(volume_dispersion >= 0.0) || !(asset_dispersion >= 0.0) || !(market_vol >= 0.0) ||
        !(idio_vol > 0.0) || !(intraday_vol >= 0.0)) {
        throw ConfigError("volatility and dispersion parameters must be non-negative (idio_vol > 0)");
    }
    if (!(option_vol_min > 0.0) || !(option_vol_max >= option_vol_min)) {
        throw ConfigError("option volatility range must satisfy 0 < min <= max");
    }
    if (expiries < 1 || strikes < 1 || expiry_spacing_days < 1 || !(strike_step > 0.0)) {
        throw ConfigError("option listing parameters must be positive");
    }
    if (exchanges.empty()) throw ConfigError("at least one exchange label is required");
    if (benchmark.empty() || benchmark.front() == 'A') {
        throw ConfigError("benchmark id must be non-empty and distinct from synthetic asset ids");
    }
}

MarketDataset generate_synthetic_market(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n_assets = cfg.assets;
    const std::size_t n_days = cfg.days;
    const std::uint64_t root = derive_seed(cfg.seed, "synth");
    const std::vector<Date> days = business_days(cfg.start, n_days);

    DatasetOptions options;
    options.benchmark = cfg.benchmark;
    DatasetBuilder builder(options);
    std::vector<ExchangeId> exchange_ids;
    for (const auto& label : cfg.exchanges) exchange_ids.push_back(builder.intern_exchange(label));

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Common market moves: overnight from day d to d+1, and intraday on day d.
    std::vector<double> market_overnight(n_days, 0.0);
    std::vector<double> market_intraday(n_days, 0.0);
    {
        Rng rng(derive_seed(root, "market"));
        for (std::size_t d = 0; d < n_days; ++d) {
            market_overnight[d] = cfg.market_vol * normal(rng);
            market_intraday[d] = 0.5 * cfg.intraday_vol * normal(rng);
        }
        double open = 100.0 * std::exp(0.2 * normal(rng));
        for (std::size_t d = 0; d < n_days; ++d) {
            const double close = open * (1.0 + market_intraday[d]);
            builder.add_equity(EquityBar{cfg.benchmark, days[d], open, close});
            open = close * (1.0 + market_overnight[d]);
        }
    }

    std::vector<bool> active(kMpcCount, false);
    for (Mpc m : cfg.mpcs) active[index(m)] = true;

    builder.reserve_points(n_assets * n_days * cfg.mpcs.size() * 6);
    builder.reserve_summaries(n_assets * n_days * static_cast<std::size_t>(cfg.expiries * cfg.strikes * 2));

    const double log_step = std::log1p(cfg.strike_step);
    const Date first_expiry = cfg.start + 20;

    for (std::size_t a = 0; a < n_assets; ++a) {
        const std::string name = synthetic_asset_name(a);
        Rng rng(derive_seed(root, static_cast<std::uint64_t>(a)));

        const double s0 = 20.0 + 180.0 * unit(rng);
        const double option_vol = cfg.option_vol_min + (cfg.option_vol_max - cfg.option_vol_min) * unit(rng);
        const double volume_scale = std::exp(cfg.asset_dispersion * normal(rng) -
                                             0.5 * cfg.asset_dispersion * cfg.asset_dispersion);

        // Equity path. eps[d] is the overnight excess return from close d to open d+1.
        std::vector<double> eps(n_days, 0.0);
        std::vector<double> open(n_days), close(n_days);
        open[0] = s0;
        for (std::size_t d = 0; d < n_days; ++d) {
            const double intraday = market_intraday[d] + cfg.intraday_vol * normal(rng);
            close[d] = open[d] * (1.0 + intraday);
            eps[d] = cfg.idio_vol * normal(rng);
            if (d + 1 < n_days) open[d + 1] = close[d] * (1.0 + market_overnight[d] + eps[d]);
            builder.add_equity(EquityBar{name, days[d], open[d], close[d]});
        }

        std::vector<Listing> listed;
        std::vector<std::int64_t> buy_total, sell_total;
        std::uniform_int_distribution<int> slot_dist(1, kSlotsPerDay);
        std::uniform_int_distribution<std::size_t> exchange_dist(0, exchange_ids.size() - 1);

        for (std::size_t d = 0; d < n_days; ++d) {
            const Date day = days[d];

            // Listings: the next `expiries` grid expiries at least three days out, strikes on a
            // geometric grid straddling today's open.
            listed.clear();
            const std::int32_t ahead = (day - first_expiry) + 3;
            std::int32_t n0 = ahead <= 0 ? 0 : (ahead + cfg.expiry_spacing_days - 1) / cfg.expiry_spacing_days;
            const int k_lo = static_cast<int>(std::floor(std::log(open[d] / s0) / log_step));
            for (int e = 0; e < cfg.expiries; ++e) {
                const Date expiry = first_expiry + (n0 + e) * cfg.expiry_spacing_days;
                for (int k = k_lo - (cfg.strikes - 1) / 2; k < k_lo - (cfg.strikes - 1) / 2 + cfg.strikes; ++k) {
                    const double strike = std::round(100.0 * s0 * std::exp(k * log_step)) / 100.0;
                    for (OptionSide side : {OptionSide::Call, OptionSide::Put}) {
                        const ContractId id = builder.intern_contract(ContractKey{name, side, strike, expiry});
                        listed.push_back(Listing{id, side, strike, expiry});
                    }
                }
            }
            buy_total.assign(listed.size(), 0);
            sell_total.assign(listed.size(), 0);
            std::uniform_int_distribution<std::size_t> pick(0, listed.size() / 2 - 1);

            auto emit_leg = [&](Mpc mpc, OptionSide option, TradeSide side, std::int64_t volume) {
                if (volume <= 0) return;
                // Calls and puts alternate in `listed`.
                const std::size_t li = 2 * pick(rng) + (option == OptionSide::Put ? 1 : 0);
                const Intent intent = mpc == Mpc::MarketMaker ? Intent::Unspecified
                                      : unit(rng) < 0.5   ? Intent::Open
                                                          : Intent::Close;
                const ExchangeId ex = exchange_ids[exchange_ids.size() == 1 ? 0 : exchange_dist(rng)];
                int s1 = slot_dist(rng);
                if (volume >= 2 && unit(rng) < 0.5) {
                    int s2 = slot_dist(rng);
                    if (s2 != s1) {
                        if (s2 < s1) std::swap(s1, s2);
                        const std::int64_t first =
                            1 + std::uniform_int_distribution<std::int64_t>(0, volume - 2)(rng);
                        builder.add_point(day, listed[li].id, ex, mpc, side, intent, s1, first, 1);
                        builder.add_point(day, listed[li].id, ex, mpc, side, intent, s2, volume, 2);
                    } else {
                        builder.add_point(day, listed[li].id, ex, mpc, side, intent, s1, volume, 1);
                    }
                } else {
                    builder.add_point(day, listed[li].id, ex, mpc, side, intent, s1, volume, 1);
                }
                (side == TradeSide::Buy ? buy_total : sell_total)[li] += volume;
            };

            for (Mpc mpc : kAllMpcs) {
                if (!active[index(mpc)]) continue;
                const double rho = cfg.rho[index(mpc)];
                double magnitude = std::abs(2.0 * beta_symmetric(rng, cfg.ovi_shape) - 1.0);
                magnitude = std::max(magnitude, cfg.min_abs_ovi);
                double sign;
                if (d + 1 < n_days) {
                    const double ret_sign = eps[d] >= 0.0 ? 1.0 : -1.0;
                    sign = unit(rng) < 0.5 * (1.0 + rho) ? ret_sign : -ret_sign;
                } else {
                    sign = unit(rng) < 0.5 ? 1.0 : -1.0;
                }
                const double target = sign * magnitude;

                const std::int64_t volume = std::max<std::int64_t>(
                    1, std::llround(cfg.base_volume * volume_scale *
                                    std::exp(cfg.volume_dispersion * normal(rng))));
                const std::int64_t up = std::llround(static_cast<double>(volume) * (1.0 + target) / 2.0);
                const std::int64_t down = volume - up;
                const std::int64_t call_buy = std::llround(static_cast<double>(up) * unit(rng));
                const std::int64_t call_sell = std::llround(static_cast<double>(down) * unit(rng));
                emit_leg(mpc, OptionSide::Call, TradeSide::Buy, call_buy);
                emit_leg(mpc, OptionSide::Put, TradeSide::Sell, up - call_buy);
                emit_leg(mpc, OptionSide::Call, TradeSide::Sell, call_sell);
                emit_leg(mpc, OptionSide::Put, TradeSide::Buy, down - call_sell);
            }

            for (std::size_t li = 0; li < listed.size(); ++li) {
                const Listing& l = listed[li];
                BsInputs in{open[d], l.strike, static_cast<double>(l.expiry - day) / 365.0, cfg.rate,
                            option_vol, l.side};
                const double px_open = std::max(bs_price(in), 1e-6);
                in.spot = close[d];
                const double px_close = std::max(bs_price(in), 1e-6);
                const std::int64_t oi = std::llround(cfg.base_volume * volume_scale * (1.0 + 20.0 * unit(rng)));
                builder.add_summary(day, SummaryRecord{l.id, px_open, px_close,
                                                       0.97 * std::min(px_open, px_close),
                                                       1.03 * std::max(px_open, px_close),
                                                       std::max<std::int64_t>(oi, 1),
                                                       std::max(buy_total[li], sell_total[li])});
            }
        }
    }
    return std::move(builder).build();
}

}  // namespace ovi
