#include "ovi/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ovi/error.hpp"

namespace ovi {

namespace {

void check_domain(const BsInputs& in, bool need_sigma) {
    if (!(in.spot > 0.0) || !(in.strike > 0.0)) {
        throw DomainError("Black-Scholes: spot and strike must be > 0");
    }
    if (!(in.tau > 0.0)) throw DomainError("Black-Scholes: tau must be > 0");
    if (need_sigma && !(in.sigma > 0.0)) throw DomainError("Black-Scholes: sigma must be > 0");
}

double price_unchecked(const BsInputs& in) {
    const double sqrt_tau = std::sqrt(in.tau);
    const double vol = in.sigma * sqrt_tau;
    const double d1 = (std::log(in.spot / in.strike) + (in.rate + 0.5 * in.sigma * in.sigma) * in.tau) / vol;
    const double d2 = d1 - vol;
    const double df = std::exp(-in.rate * in.tau);
    if (in.side == OptionSide::Call) {
        return in.spot * norm_cdf(d1) - in.strike * df * norm_cdf(d2);
    }
    return in.strike * df * norm_cdf(-d2) - in.spot * norm_cdf(-d1);
}

}  // namespace

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double bs_d1(const BsInputs& in) {
    check_domain(in, true);
    return (std::log(in.spot / in.strike) + (in.rate + 0.5 * in.sigma * in.sigma) * in.tau) /
           (in.sigma * std::sqrt(in.tau));
}

double bs_d2(const BsInputs& in) { return bs_d1(in) - in.sigma * std::sqrt(in.tau); }

double bs_price(const BsInputs& in) {
    check_domain(in, true);
    return price_unchecked(in);
}

GreeksResult bs_greeks(const BsInputs& in) {
    check_domain(in, true);
    const double sqrt_tau = std::sqrt(in.tau);
    const double d1 = bs_d1(in);
    const double d2 = d1 - in.sigma * sqrt_tau;
    const double df = std::exp(-in.rate * in.tau);
    const double pdf1 = norm_pdf(d1);

    GreeksResult g;
    g.price = price_unchecked(in);
    g.gamma = pdf1 / (in.spot * in.sigma * sqrt_tau);
    g.vega = in.spot * pdf1 * sqrt_tau;
    const double decay = -in.spot * pdf1 * in.sigma / (2.0 * sqrt_tau);
    if (in.side == OptionSide::Call) {
        g.delta = norm_cdf(d1);
        g.theta = decay - in.rate * in.strike * df * norm_cdf(d2);
        g.rho = in.strike * in.tau * df * norm_cdf(d2);
    } else {
        g.delta = norm_cdf(d1) - 1.0;
        g.theta = decay + in.rate * in.strike * df * norm_cdf(-d2);
        g.rho = -in.strike * in.tau * df * norm_cdf(-d2);
    }
    return g;
}

IvResult implied_volatility(double price_obs, const BsInputs& in, const IvOptions& options) {
    check_domain(in, false);
    const double tol = options.tol.value_or(1e-8 * in.strike);
    const double df = std::exp(-in.rate * in.tau);
    const double lower = in.side == OptionSide::Call ? std::max(in.spot - in.strike * df, 0.0)
                                                     : std::max(in.strike * df - in.spot, 0.0);
    const double upper = in.side == OptionSide::Call ? in.spot : in.strike * df;
    if (!(price_obs >= lower && price_obs <= upper)) {
        throw NoSolutionError("implied volatility: price " + std::to_string(price_obs) +
                              " outside no-arbitrage band [" + std::to_string(lower) + ", " +
                              std::to_string(upper) + "]");
    }

    BsInputs probe = in;
    auto f = [&](double sigma) {
        probe.sigma = sigma;
        return price_unchecked(probe) - price_obs;
    };
    double lo = options.sigma_min;
    double hi = options.sigma_max;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo > tol || f_hi < -tol) {
        throw NoSolutionError("implied volatility: price not attainable for sigma in [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if (std::abs(f_lo) <= tol && f_lo >= 0.0) return IvResult{lo, 0, f_lo};
    if (std::abs(f_hi) <= tol && f_hi <= 0.0) return IvResult{hi, 0, f_hi};

    // Price is strictly increasing in sigma, so the bracket always holds the root. Bisect until
    // the bracket collapses so sigma is accurate even where vega is small.
    double mid = 0.5 * (lo + hi);
    double f_mid = f(mid);
    int it = 1;
    for (; it < options.max_iterations; ++it) {
        if (f_mid == 0.0 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) break;
        if (f_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        f_mid = f(mid);
    }
    if (std::abs(f_mid) > tol) {
        throw SolverError("implied volatility: no convergence after " + std::to_string(it) +
                              " iterations",
                          f_mid);
    }
    return IvResult{mid, it, f_mid};
}

double standardized_moneyness(const BsInputs& in) {
    check_domain(in, true);
    const double m = (std::log(in.spot / in.strike) + in.rate * in.tau) / (in.sigma * std::sqrt(in.tau));
    return in.side == OptionSide::Call ? m : -m;
}

}  // namespace ovi
