#pragma once

#include <cstdint>
#include <span>

#include "ovi/portfolio.hpp"

namespace ovi {

struct SrDifferenceOptions {
    std::size_t block_len = 0;  ///< 0 means ceil(T^(1/3))
    std::size_t n_boot = 2000;
    std::uint64_t seed = 0;     ///< root of the per-resample streams
};

struct SrDifferenceResult {
    double delta = 0.0;      ///< SR1 - SR2, daily
    double se = 0.0;         ///< delta-method standard error
    double statistic = 0.0;  ///< delta / se
    double p_value = 1.0;
    std::size_t block_len = 0;
};

/// Studentized circular-block bootstrap test of H0: SR1 = SR2 on paired daily P&L. The
/// standard error is the delta-method one on (mu1, mu2, E x1^2, E x2^2) with a block-sum
/// covariance estimate; the p-value is the share of resamples with |t*| >= |t|, where
/// t* = (delta* - delta) / se*. Throws DimensionError for series of different length.
SrDifferenceResult sr_difference_test(std::span<const double> p1, std::span<const double> p2,
                                      const SrDifferenceOptions& options = {});
SrDifferenceResult sr_difference_test(const PnlSeries& p1, const PnlSeries& p2,
                                      const SrDifferenceOptions& options = {});

}  // namespace ovi
