#include "ovi/bootstrap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "ovi/error.hpp"
#include "ovi/parallel.hpp"
#include "ovi/random.hpp"

namespace ovi {

namespace {

struct DeltaEstimate {
    double delta = 0.0;
    double se = 0.0;
    bool valid = false;
};

/// Delta and its standard error for the series x[idx[t]], y[idx[t]], t = 0..T-1.
template <typename Index>
DeltaEstimate estimate(std::span<const double> x, std::span<const double> y, Index idx, std::size_t n,
                       std::size_t block_len) {
    const double nn = static_cast<double>(n);
    double mu1 = 0.0, mu2 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double a = x[idx(t)], b = y[idx(t)];
        mu1 += a;
        mu2 += b;
        g1 += a * a;
        g2 += b * b;
    }
    mu1 /= nn;
    mu2 /= nn;
    g1 /= nn;
    g2 /= nn;
    const double v1 = g1 - mu1 * mu1;
    const double v2 = g2 - mu2 * mu2;
    DeltaEstimate e;
    if (!(v1 > 0.0) || !(v2 > 0.0)) return e;
    e.delta = mu1 / std::sqrt(v1) - mu2 / std::sqrt(v2);
    const std::array<double, 4> grad{g1 / std::pow(v1, 1.5), -g2 / std::pow(v2, 1.5),
                                     -0.5 * mu1 / std::pow(v1, 1.5), 0.5 * mu2 / std::pow(v2, 1.5)};

    // Psi from non-overlapping block sums of the centered moment conditions.
    const std::size_t blocks = std::max<std::size_t>(1, n / block_len);
    std::array<double, 16> psi{};
    for (std::size_t j = 0; j < blocks; ++j) {
        std::array<double, 4> z{};
        const std::size_t end = (j + 1 == blocks) ? n : (j + 1) * block_len;
        for (std::size_t t = j * block_len; t < end; ++t) {
            const double a = x[idx(t)], b = y[idx(t)];
            z[0] += a - mu1;
            z[1] += b - mu2;
            z[2] += a * a - g1;
            z[3] += b * b - g2;
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(end - j * block_len));
        for (double& v : z) v *= scale;
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) psi[r * 4 + c] += z[r] * z[c];
        }
    }
    double quad = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) quad += grad[r] * psi[r * 4 + c] * grad[c];
    }
    quad /= static_cast<double>(blocks);
    e.se = std::sqrt(std::max(quad, 0.0) / nn);
    e.valid = true;
    return e;
}

}  // namespace

SrDifferenceResult sr_difference_test(std::span<const double> p1, std::span<const double> p2,
                                      const SrDifferenceOptions& options) {
    if (p1.size() != p2.size()) throw DimensionError("SR difference test: series lengths differ");
    const std::size_t n = p1.size();
    if (n < 4) throw UndefinedStatisticError("SR difference test needs at least 4 observations");
    if (options.n_boot == 0) throw ConfigError("SR difference test needs n_boot >= 1");
    SrDifferenceResult r;
    r.block_len = options.block_len
                      ? options.block_len
                      : static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-12));
    r.block_len = std::min(std::max<std::size_t>(r.block_len, 1), n);

    const DeltaEstimate obs = estimate(p1, p2, [](std::size_t t) { return t; }, n, r.block_len);
    if (!obs.valid) throw UndefinedStatisticError("SR difference test: a series has zero variance");
    r.delta = obs.delta;
    r.se = obs.se;
    if (obs.se == 0.0) {
        if (obs.delta != 0.0) throw UndefinedStatisticError("SR difference test: zero standard error");
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.statistic = obs.delta / obs.se;

    const std::size_t block = r.block_len;
    const std::size_t blocks_needed = (n + block - 1) / block;
    std::vector<std::uint8_t> exceed(options.n_boot, 0);
    parallel_for(options.n_boot, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> index(n);
        for (std::size_t b = begin; b < end; ++b) {
            Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(b)));
            std::uniform_int_distribution<std::size_t> start(0, n - 1);
            std::size_t t = 0;
            for (std::size_t k = 0; k < blocks_needed && t < n; ++k) {
                const std::size_t s = start(rng);
                for (std::size_t j = 0; j < block && t < n; ++j) index[t++] = (s + j) % n;
            }
            const DeltaEstimate e = estimate(p1, p2, [&](std::size_t i) { return index[i]; }, n, block);
            if (!e.valid || e.se == 0.0) {
                exceed[b] = 1;  // degenerate resample: count against rejection
                continue;
            }
            const double t_star = (e.delta - obs.delta) / e.se;
            exceed[b] = std::abs(t_star) >= std::abs(r.statistic) ? 1 : 0;
        }
    });
    std::size_t count = 0;
    for (auto v : exceed) count += v;
    r.p_value = static_cast<double>(count) / static_cast<double>(options.n_boot);
    return r;
}

SrDifferenceResult sr_difference_test(const PnlSeries& p1, const PnlSeries& p2, const SrDifferenceOptions& options) {
    if (p1.days != p2.days) throw DimensionError("SR difference test: series are not aligned on days");
    return sr_difference_test(p1.daily, p2.daily, options);
}

}  // namespace ovi
