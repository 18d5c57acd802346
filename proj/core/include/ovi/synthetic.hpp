#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ovi/dataset.hpp"

namespace ovi {

/// Parameters of the synthetic market generator.
///
/// Overnight excess returns are iid normal. Each (asset, day, MPC) cell draws a target imbalance
/// whose sign agrees with the sign of that asset's next overnight excess return with probability
/// (1 + rho[mpc]) / 2, and whose magnitude is |2B - 1| for B ~ Beta(ovi_shape, ovi_shape).
struct SynthConfig {
    std::size_t assets = 50;
    std::size_t days = 600;
    std::uint64_t seed = 1;

    /// Planted sign correlation per MPC, indexed by index(Mpc).
    std::array<double, kMpcCount> rho{};
    /// MPCs that report flow; the others are absent from the dataset.
    std::vector<Mpc> mpcs{kAllMpcs.begin(), kAllMpcs.end()};

    double base_volume = 200.0;       ///< median contracts per (asset, day, MPC)
    double volume_dispersion = 0.5;   ///< log-sd of the per-cell volume
    double asset_dispersion = 0.5;    ///< log-sd of the per-asset volume scale
    double ovi_shape = 1.0;           ///< Beta shape of the target imbalance
    double min_abs_ovi = 0.0;         ///< floor on |target imbalance|

    double market_vol = 0.01;         ///< daily sd of the common overnight move
    double idio_vol = 0.02;           ///< daily sd of the overnight excess return
    double intraday_vol = 0.015;      ///< daily sd of the open-to-close move

    double option_vol_min = 0.2;      ///< per-asset option volatility ~ U[min, max]
    double option_vol_max = 0.6;
    double rate = 0.0;
    int expiries = 2;                 ///< listed expiries per day
    int strikes = 2;                  ///< listed strikes per expiry, straddling the open
    int expiry_spacing_days = 28;
    double strike_step = 0.05;        ///< relative spacing of the strike grid

    std::string benchmark = kDefaultBenchmark;
    std::vector<std::string> exchanges{"PHLX"};
    Date start = Date::from_ymd(2015, 1, 2);

    /// Throws ConfigError on out-of-range parameters.
    void validate() const;
};

/// Deterministic for a fixed config (including seed).
MarketDataset generate_synthetic_market(const SynthConfig& cfg);

/// Name of the i-th synthetic asset ("A0000", ...). Lexicographic order equals index order.
std::string synthetic_asset_name(std::size_t i);

}  // namespace ovi
