#pragma once

#include <optional>

#include "ovi/types.hpp"

namespace ovi {

/// Black-Scholes inputs for a European option on a non-dividend-paying underlying.
struct BsInputs {
    double spot = 0.0;
    double strike = 0.0;
    double tau = 0.0;    ///< years to expiry
    double rate = 0.0;   ///< continuously compounded, annualized
    double sigma = 0.0;  ///< annualized volatility
    OptionSide side = OptionSide::Call;
};

/// Price plus the five first-order sensitivities (second order for gamma).
/// theta is -dP/dtau; vega and rho are raw derivatives w.r.t. sigma and r.
struct GreeksResult {
    double price = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double vega = 0.0;
    double rho = 0.0;
};

struct IvResult {
    double sigma = 0.0;
    int iterations = 0;
    double residual = 0.0;  ///< model price minus observed price at `sigma`
};

struct IvOptions {
    double sigma_min = 1e-4;
    double sigma_max = 5.0;
    /// Absolute price tolerance; nullopt means 1e-8 * strike.
    std::optional<double> tol;
    int max_iterations = 200;
};

double norm_cdf(double x) noexcept;
double norm_pdf(double x) noexcept;

double bs_d1(const BsInputs& in);
double bs_d2(const BsInputs& in);

/// Throws DomainError unless spot, strike, tau and sigma are all > 0.
double bs_price(const BsInputs& in);
GreeksResult bs_greeks(const BsInputs& in);

/// Bisection on [sigma_min, sigma_max]; `in.sigma` is ignored.
/// Throws NoSolutionError outside the no-arbitrage band and SolverError on non-convergence.
IvResult implied_volatility(double price_obs, const BsInputs& in, const IvOptions& options = {});

/// +log(S e^{r tau} / K) / (sigma sqrt(tau)) for calls, negated for puts.
double standardized_moneyness(const BsInputs& in);

}  // namespace ovi
