#pragma once

#include <span>
#include <string>
#include <vector>

#include "ovi/portfolio.hpp"

namespace ovi {

inline constexpr double kTradingDaysPerYear = 252.0;

struct PerformanceSummary {
    double sharpe = 0.0;            ///< mean * sqrt(252) / sd, sd with n - 1
    double ppd = 0.0;               ///< sum P&L / sum B_d
    double profitable_ratio = 0.0;  ///< max(pi, 1 - pi)
    double pi = 0.0;                ///< share of trading days with positive P&L
    double n_avg = 0.0;             ///< mean number of assets per trading day
    std::size_t trading_days = 0;
};

/// Throws UndefinedStatisticError for fewer than 2 days, zero variance, or zero total bets.
PerformanceSummary performance_summary(const PnlSeries& p);

/// Sample moments of a series. Skewness and kurtosis are the biased moment ratios; kurtosis
/// is raw (3 for a normal).
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  ///< n - 1 denominator
    double skew = 0.0;
    double kurt = 0.0;
};
Moments sample_moments(std::span<const double> x);
/// Same from raw power sums sum x, sum x^2, sum x^3, sum x^4.
Moments moments_from_sums(std::size_t n, double s1, double s2, double s3, double s4);

struct SrTestOptions {
    /// Reads the variance term as (kurt - 1) * 2 SR / 4, the literal printed form, instead of
    /// the (kurt - 1) SR^2 / 4 of the non-normal SR variance.
    bool literal_sr_times_two = false;
};

struct SrTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double sr = 0.0;  ///< daily, not annualized
    double skew = 0.0;
    double kurt = 0.0;
    std::vector<std::string> warnings;
};

/// statistic = SR / sqrt((1 - skew SR + (kurt - 1) SR^2 / 4) / (T - 1)) on the daily SR,
/// two-sided normal p-value. Throws UndefinedStatisticError on zero variance or a
/// non-positive variance term.
SrTestResult sr_significance_test(std::span<const double> daily, const SrTestOptions& options = {});
SrTestResult sr_significance_test(const PnlSeries& p, const SrTestOptions& options = {});
SrTestResult sr_test_from_moments(const Moments& m, const SrTestOptions& options = {});

/// Two-sided standard-normal p-value of a z statistic.
[[nodiscard]] double normal_two_sided_p(double z) noexcept;

}  // namespace ovi
