#include "ovi/stats.hpp"

#include <cmath>
#include <numbers>

#include "ovi/error.hpp"

namespace ovi {

namespace {

// A constant series can leave rounding-level spread around its computed mean.
bool has_variance(const Moments& m) { return m.sd > 1e-12 * std::abs(m.mean); }

}  // namespace

PerformanceSummary performance_summary(const PnlSeries& p) {
    if (p.size() < 2) throw UndefinedStatisticError("performance summary needs at least 2 days");
    const Moments m = sample_moments(p.daily);
    if (!has_variance(m)) throw UndefinedStatisticError("Sharpe ratio undefined: P&L has zero variance");
    double pnl = 0.0, gross = 0.0, assets = 0.0;
    std::size_t trading = 0, positive = 0;
    for (std::size_t d = 0; d < p.size(); ++d) {
        pnl += p.daily[d];
        gross += p.gross[d];
        if (p.gross[d] > 0.0) {
            ++trading;
            if (p.daily[d] > 0.0) ++positive;
            assets += d < p.n_assets.size() ? p.n_assets[d] : 0.0;
        }
    }
    if (!(gross > 0.0)) throw UndefinedStatisticError("PPD undefined: no bets were placed");
    PerformanceSummary s;
    s.sharpe = m.mean * std::sqrt(kTradingDaysPerYear) / m.sd;
    s.ppd = pnl / gross;
    s.trading_days = trading;
    s.pi = static_cast<double>(positive) / static_cast<double>(trading);
    s.profitable_ratio = std::max(s.pi, 1.0 - s.pi);
    s.n_avg = assets / static_cast<double>(trading);
    return s;
}

Moments moments_from_sums(std::size_t n, double s1, double s2, double s3, double s4) {
    Moments m;
    m.n = n;
    if (n == 0) return m;
    const double nn = static_cast<double>(n);
    const double mu = s1 / nn;
    // Central moments from raw power sums.
    const double m2 = std::max(s2 / nn - mu * mu, 0.0);
    const double m3 = s3 / nn - 3.0 * mu * s2 / nn + 2.0 * mu * mu * mu;
    const double m4 = s4 / nn - 4.0 * mu * s3 / nn + 6.0 * mu * mu * s2 / nn - 3.0 * mu * mu * mu * mu;
    m.mean = mu;
    m.sd = n > 1 ? std::sqrt(m2 * nn / (nn - 1.0)) : 0.0;
    if (m2 > 0.0) {
        m.skew = m3 / std::pow(m2, 1.5);
        m.kurt = m4 / (m2 * m2);
    }
    return m;
}

Moments sample_moments(std::span<const double> x) {
    Moments m;
    m.n = x.size();
    if (x.empty()) return m;
    const double nn = static_cast<double>(x.size());
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= nn;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double c = v - mu;
        const double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m.mean = mu;
    m.sd = x.size() > 1 ? std::sqrt(m2 / (nn - 1.0)) : 0.0;
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (m2 > 0.0) {
        m.skew = m3 / std::pow(m2, 1.5);
        m.kurt = m4 / (m2 * m2);
    }
    return m;
}

double normal_two_sided_p(double z) noexcept { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

SrTestResult sr_test_from_moments(const Moments& m, const SrTestOptions& options) {
    if (m.n < 2) throw UndefinedStatisticError("SR test needs at least 2 observations");
    if (!has_variance(m)) throw UndefinedStatisticError("SR test undefined: zero variance");
    SrTestResult r;
    r.sr = m.mean / m.sd;
    r.skew = m.skew;
    r.kurt = m.kurt;
    const double sr_term = options.literal_sr_times_two ? 2.0 * r.sr : r.sr * r.sr;
    const double var_term = 1.0 - m.skew * r.sr + (m.kurt - 1.0) * sr_term / 4.0;
    if (!(var_term > 0.0)) {
        throw UndefinedStatisticError("SR test undefined: non-positive variance term");
    }
    r.statistic = r.sr / std::sqrt(var_term / static_cast<double>(m.n - 1));
    r.p_value = normal_two_sided_p(r.statistic);
    if (m.n < 30) r.warnings.push_back("SR test on fewer than 30 observations");
    return r;
}

SrTestResult sr_significance_test(std::span<const double> daily, const SrTestOptions& options) {
    return sr_test_from_moments(sample_moments(daily), options);
}

SrTestResult sr_significance_test(const PnlSeries& p, const SrTestOptions& options) {
    return sr_significance_test(p.daily, options);
}

}  // namespace ovi
