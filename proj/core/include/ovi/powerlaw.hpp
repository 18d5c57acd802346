#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ovi {

/// log of the Hurwitz zeta function sum_{k>=0} (a + k)^-s, for s > 1 and a > 0.
[[nodiscard]] double log_hurwitz_zeta(double s, double a);

struct PowerLawFit {
    double alpha = 0.0;
    std::int64_t xmin = 1;
    double ks = 0.0;           ///< KS distance between tail data and the fitted model
    std::size_t n_tail = 0;
};

/// Discrete power-law fit of the positive entries of `data`: alpha by maximum likelihood for
/// every candidate xmin (distinct values leaving at least `min_tail` points, the largest value
/// excluded), xmin by minimum KS distance. Throws DegenerateFitError with fewer than 3
/// distinct positive values.
PowerLawFit fit_discrete_powerlaw(std::span<const std::int64_t> data, std::size_t min_tail = 10);

/// MLE of alpha for a fixed xmin.
double powerlaw_alpha_mle(std::span<const std::int64_t> tail, std::int64_t xmin);

/// Draws from the discrete power law P(x) = x^-alpha / zeta(alpha, xmin), x >= xmin.
class DiscretePowerLawSampler {
public:
    DiscretePowerLawSampler(double alpha, std::int64_t xmin);
    /// Inverse-CDF draw for a uniform u in [0, 1).
    [[nodiscard]] std::int64_t operator()(double u) const;

private:
    double alpha_;
    std::int64_t xmin_;
    std::vector<double> ccdf_;  ///< P(X >= xmin + k)
};

struct PowerLawTest {
    PowerLawFit fit;
    double p_value = 0.0;
    std::size_t n_boot = 0;
    std::vector<std::string> warnings;
};

/// Goodness-of-fit p-value by semi-parametric bootstrap: each replicate resamples the body
/// below xmin from the data and the tail from the fitted law, refits, and compares KS
/// distances. A power law is conventionally rejected when p < 0.1.
PowerLawTest powerlaw_degree_test(std::span<const std::int64_t> degrees, std::size_t n_boot = 1000,
                                  std::uint64_t seed = 0, std::size_t min_tail = 10);

}  // namespace ovi
