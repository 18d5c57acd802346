#include "ovi/powerlaw.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "ovi/error.hpp"
#include "ovi/parallel.hpp"
#include "ovi/random.hpp"

namespace ovi {

double log_hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw DomainError("Hurwitz zeta needs s > 1 and a > 0");
    // Euler-Maclaurin after enough direct terms, everything scaled by a^-s to avoid underflow.
    static constexpr std::array<double, 7> kBernoulli{1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                                      5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};
    const double start = std::max(15.0, s + 10.0);
    const auto direct = static_cast<std::int64_t>(std::max(0.0, std::ceil(start - a)));
    const double log_a = std::log(a);
    double sum = 0.0;
    for (std::int64_t k = 0; k < direct; ++k) {
        sum += std::exp(-s * (std::log(a + static_cast<double>(k)) - log_a));
    }
    const double n0 = a + static_cast<double>(direct);
    double tail = n0 / (s - 1.0) + 0.5;
    double poch = s;           // s (s+1) ... (s+2j-2)
    double factorial = 2.0;    // (2j)!
    double power = 1.0 / n0;   // n0^(1-2j)
    for (std::size_t j = 0; j < kBernoulli.size(); ++j) {
        tail += kBernoulli[j] / factorial * poch * power;
        const double m = 2.0 * static_cast<double>(j + 1);
        poch *= (s + m - 1.0) * (s + m);
        factorial *= (m + 1.0) * (m + 2.0);
        power /= n0 * n0;
    }
    sum += std::exp(-s * (std::log(n0) - log_a)) * tail;
    return -s * log_a + std::log(sum);
}

namespace {

constexpr double kAlphaLo = 1.0 + 1e-6;
constexpr double kAlphaHi = 50.0;

double alpha_mle(std::size_t n, double sum_log, std::int64_t xmin) {
    const double nn = static_cast<double>(n);
    const auto neg_ll = [&](double alpha) {
        return nn * log_hurwitz_zeta(alpha, static_cast<double>(xmin)) + alpha * sum_log;
    };
    return boost::math::tools::brent_find_minima(neg_ll, kAlphaLo, kAlphaHi, 40).first;
}

/// KS distance between sorted tail data (all >= xmin) and the fitted discrete law.
double ks_distance(std::span<const std::int64_t> tail, double alpha, std::int64_t xmin) {
    const double n = static_cast<double>(tail.size());
    const double z0 = std::exp(log_hurwitz_zeta(alpha, static_cast<double>(xmin)));
    double z = z0;             // zeta(alpha, x)
    std::int64_t x = xmin;
    double d = 0.0;
    for (std::size_t i = 0; i < tail.size();) {
        const std::int64_t v = tail[i];
        std::size_t j = i;
        while (j < tail.size() && tail[j] == v) ++j;
        // Advance z to zeta(alpha, v + 1).
        const std::int64_t target = v + 1;
        if (target - x <= 64) {
            for (; x < target; ++x) z -= std::pow(static_cast<double>(x), -alpha);
        } else {
            z = std::exp(log_hurwitz_zeta(alpha, static_cast<double>(target)));
            x = target;
        }
        const double model_cdf = 1.0 - std::max(z, 0.0) / z0;
        const double emp_cdf = static_cast<double>(j) / n;
        d = std::max(d, std::abs(emp_cdf - model_cdf));
        i = j;
    }
    return d;
}

PowerLawFit fit_sorted(std::span<const std::int64_t> x, std::size_t min_tail) {
    std::vector<std::int64_t> unique(x.begin(), x.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    if (unique.size() < 3) throw DegenerateFitError("power-law fit needs at least 3 distinct positive values");

    // suffix_log[i] = sum_{k >= i} log x_k
    std::vector<double> suffix_log(x.size() + 1, 0.0);
    for (std::size_t i = x.size(); i-- > 0;) suffix_log[i] = suffix_log[i + 1] + std::log(static_cast<double>(x[i]));

    PowerLawFit best;
    best.ks = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t u = 0; u + 1 < unique.size(); ++u) {
        const std::int64_t xmin = unique[u];
        const std::size_t first = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), xmin) - x.begin());
        const std::size_t n_tail = x.size() - first;
        if (n_tail < min_tail) break;
        const auto tail = x.subspan(first);
        const double alpha = alpha_mle(n_tail, suffix_log[first], xmin);
        const double ks = ks_distance(tail, alpha, xmin);
        if (ks < best.ks) best = PowerLawFit{alpha, xmin, ks, n_tail};
        any = true;
    }
    if (!any) {
        const double alpha = alpha_mle(x.size(), suffix_log[0], unique.front());
        best = PowerLawFit{alpha, unique.front(), ks_distance(x, alpha, unique.front()), x.size()};
    }
    return best;
}

std::vector<std::int64_t> positive_sorted(std::span<const std::int64_t> data) {
    std::vector<std::int64_t> x;
    x.reserve(data.size());
    for (auto v : data) {
        if (v > 0) x.push_back(v);
    }
    std::sort(x.begin(), x.end());
    return x;
}

}  // namespace

double powerlaw_alpha_mle(std::span<const std::int64_t> tail, std::int64_t xmin) {
    if (tail.empty() || xmin < 1) throw DomainError("power-law MLE needs data and xmin >= 1");
    double sum_log = 0.0;
    for (auto v : tail) {
        if (v < xmin) throw DomainError("power-law MLE: value below xmin");
        sum_log += std::log(static_cast<double>(v));
    }
    return alpha_mle(tail.size(), sum_log, xmin);
}

PowerLawFit fit_discrete_powerlaw(std::span<const std::int64_t> data, std::size_t min_tail) {
    const std::vector<std::int64_t> x = positive_sorted(data);
    return fit_sorted(x, min_tail);
}

DiscretePowerLawSampler::DiscretePowerLawSampler(double alpha, std::int64_t xmin) : alpha_(alpha), xmin_(xmin) {
    if (!(alpha > 1.0) || xmin < 1) throw DomainError("power-law sampler needs alpha > 1 and xmin >= 1");
    const double log_z0 = log_hurwitz_zeta(alpha, static_cast<double>(xmin));
    const double z0 = std::exp(log_z0);
    double z = z0;
    constexpr std::size_t kMaxTable = 20000;
    for (std::size_t k = 0; k < kMaxTable; ++k) {
        const double x = static_cast<double>(xmin) + static_cast<double>(k);
        if (k % 256 == 0) z = std::exp(log_hurwitz_zeta(alpha, x));  // limit cancellation drift
        const double c = z / z0;
        ccdf_.push_back(c);
        if (c < 1e-12) break;
        z -= std::pow(x, -alpha);
    }
}

std::int64_t DiscretePowerLawSampler::operator()(double u) const {
    const double r = 1.0 - u;  // in (0, 1]
    // Largest k with ccdf_[k] >= r.
    auto it = std::upper_bound(ccdf_.begin(), ccdf_.end(), r, [](double value, double c) { return value > c; });
    const auto k = static_cast<std::size_t>(it - ccdf_.begin());
    if (k < ccdf_.size()) return xmin_ + static_cast<std::int64_t>(k) - 1;
    // Beyond the table: continuous approximation of the conditional tail.
    const double x_end = static_cast<double>(xmin_) + static_cast<double>(ccdf_.size() - 1);
    const double x = (x_end - 0.5) * std::pow(r / ccdf_.back(), -1.0 / (alpha_ - 1.0)) + 0.5;
    return static_cast<std::int64_t>(std::min(std::floor(x), 1e15));
}

PowerLawTest powerlaw_degree_test(std::span<const std::int64_t> degrees, std::size_t n_boot, std::uint64_t seed,
                                  std::size_t min_tail) {
    const std::vector<std::int64_t> x = positive_sorted(degrees);
    PowerLawTest out;
    if (x.size() < 10) out.warnings.push_back("power-law test on fewer than 10 nonzero degrees");
    out.fit = fit_sorted(x, min_tail);
    out.n_boot = n_boot;
    if (n_boot == 0) return out;

    const std::size_t n = x.size();
    const std::size_t n_body = n - out.fit.n_tail;
    const double p_tail = static_cast<double>(out.fit.n_tail) / static_cast<double>(n);
    const DiscretePowerLawSampler sampler(out.fit.alpha, out.fit.xmin);

    std::vector<std::int8_t> result(n_boot, -1);  // 1 exceed, 0 not, -1 failed
    parallel_for(n_boot, [&](std::size_t begin, std::size_t end) {
        std::vector<std::int64_t> sample(n);
        for (std::size_t b = begin; b < end; ++b) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (n_body == 0 || unit(rng) < p_tail) {
                    sample[i] = sampler(unit(rng));
                } else {
                    sample[i] = x[std::uniform_int_distribution<std::size_t>(0, n_body - 1)(rng)];
                }
            }
            std::sort(sample.begin(), sample.end());
            try {
                result[b] = fit_sorted(sample, min_tail).ks >= out.fit.ks ? 1 : 0;
            } catch (const DegenerateFitError&) {
            }
        }
    });
    std::size_t exceed = 0, valid = 0;
    for (auto r : result) {
        if (r < 0) continue;
        ++valid;
        exceed += static_cast<std::size_t>(r);
    }
    if (valid < n_boot) out.warnings.push_back(std::to_string(n_boot - valid) + " bootstrap replicates were degenerate");
    out.p_value = valid ? static_cast<double>(exceed) / static_cast<double>(valid) : 0.0;
    return out;
}

}  // namespace ovi
