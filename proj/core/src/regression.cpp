#include "ovi/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ovi/error.hpp"
#include "ovi/parallel.hpp"
#include "ovi/random.hpp"

namespace ovi {

FeatureTensor stack_features(std::span<const Panel> panels, std::vector<std::string> ids) {
    if (panels.empty()) throw DimensionError("stack_features: no panels");
    for (const Panel& p : panels) {
        if (!p.aligned_with(panels.front())) throw DimensionError("stack_features: panels are not aligned");
    }
    FeatureTensor t(panels.front().asset_count(), panels.front().day_count(), panels.size());
    for (std::size_t k = 0; k < panels.size(); ++k) {
        for (std::size_t a = 0; a < t.assets; ++a) {
            for (std::size_t d = 0; d < t.days; ++d) {
                const double v = panels[k](a, d);
                t.at(a, d, k) = std::isnan(v) ? 0.0 : v;
            }
        }
    }
    if (ids.empty()) {
        for (std::size_t k = 0; k < panels.size(); ++k) ids.push_back("f" + std::to_string(k + 1));
    }
    if (ids.size() != panels.size()) throw DimensionError("stack_features: one id per panel required");
    t.feature_ids = std::move(ids);
    return t;
}

void HyperParams::validate() const {
    if (!(alpha1 > 0.0)) throw ConfigError("alpha1 must be > 0");
    if (!(alpha2 > 0.0)) throw ConfigError("alpha2 must be > 0");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    for (double l : lambda_grid) {
        if (!(l >= 0.0)) throw ConfigError("lambda grid values must be >= 0");
    }
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("validation_fraction must lie in (0, 1)");
    }
    if (!(learn_rate > 0.0)) throw ConfigError("learn_rate must be > 0");
    if (!(moment1 >= 0.0 && moment1 < 1.0) || !(moment2 >= 0.0 && moment2 < 1.0)) {
        throw ConfigError("ADAM moments must lie in [0, 1)");
    }
    if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
    if (!(tol >= 0.0) || !(init_scale >= 0.0)) throw ConfigError("tol and init_scale must be >= 0");
}

double activation_g(double x, double alpha1) noexcept { return std::tanh(0.5 * alpha1 * x); }

double activation_g_prime(double x, double alpha1) noexcept {
    const double g = std::tanh(0.5 * alpha1 * x);
    return 0.5 * alpha1 * (1.0 - g * g);
}

double smooth_abs_h(double x, double alpha2) noexcept { return std::sqrt(x * x + alpha2); }

double smooth_abs_h_prime(double x, double alpha2) noexcept { return x / std::sqrt(x * x + alpha2); }

namespace {

void check_shapes(std::span<const double> beta, const FeatureTensor& a, const Panel& returns) {
    if (beta.size() != a.features + 1) throw DimensionError("beta must have K + 1 entries");
    if (returns.asset_count() != a.assets || returns.day_count() != a.days) {
        throw DimensionError("feature tensor and returns panel shapes differ");
    }
}

DayRange clamp(DayRange r, std::size_t days) {
    r.end = std::min(r.end, days);
    r.begin = std::min(r.begin, r.end);
    return r;
}

double signal(std::span<const double> beta, const FeatureTensor& a, std::size_t i, std::size_t d) {
    const double* row = &a.values[(i * a.days + d) * a.features];
    double s = beta[0];
    for (std::size_t k = 0; k < a.features; ++k) s += beta[k + 1] * row[k];
    return s;
}

}  // namespace

double soft_pnl_objective(std::span<const double> beta, const FeatureTensor& a, const Panel& returns,
                          const HyperParams& hp, DayRange range, std::span<double> grad) {
    check_shapes(beta, a, returns);
    range = clamp(range, a.days);
    const std::size_t k1 = a.features + 1;
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != k1) throw DimensionError("gradient buffer must have K + 1 entries");
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

    std::vector<double> g(a.assets), gp(a.assets);
    std::vector<double> num_grad(k1), den_grad(k1);
    double total = 0.0;
    for (std::size_t d = range.begin; d < range.end; ++d) {
        double num = 0.0, den = 0.0;
        std::fill(num_grad.begin(), num_grad.end(), 0.0);
        std::fill(den_grad.begin(), den_grad.end(), 0.0);
        bool any = false;
        for (std::size_t i = 0; i < a.assets; ++i) {
            const double f = returns(i, d);
            if (std::isnan(f)) continue;
            any = true;
            const double s = signal(beta, a, i, d);
            const double gi = activation_g(s, hp.alpha1);
            num += f * gi;
            den += smooth_abs_h(gi, hp.alpha2);
            if (want_grad) {
                const double gpi = 0.5 * hp.alpha1 * (1.0 - gi * gi);
                const double wn = f * gpi;
                const double wd = smooth_abs_h_prime(gi, hp.alpha2) * gpi;
                const double* row = &a.values[(i * a.days + d) * a.features];
                num_grad[0] += wn;
                den_grad[0] += wd;
                for (std::size_t k = 0; k < a.features; ++k) {
                    num_grad[k + 1] += wn * row[k];
                    den_grad[k + 1] += wd * row[k];
                }
            }
        }
        if (!any) continue;
        total -= num / den;
        if (want_grad) {
            const double q = num / (den * den);
            for (std::size_t k = 0; k < k1; ++k) grad[k] -= num_grad[k] / den - q * den_grad[k];
        }
    }
    for (std::size_t k = 1; k < k1; ++k) {
        total += hp.lambda * smooth_abs_h(beta[k], hp.alpha2);
        if (want_grad) grad[k] += hp.lambda * smooth_abs_h_prime(beta[k], hp.alpha2);
    }
    return total;
}

std::vector<double> objective_gradient(std::span<const double> beta, const FeatureTensor& a, const Panel& returns,
                                       const HyperParams& hp, DayRange range) {
    std::vector<double> grad(beta.size());
    soft_pnl_objective(beta, a, returns, hp, range, grad);
    return grad;
}

AdamResult adam_minimize(const ObjectiveFn& f, std::vector<double> beta, const HyperParams& hp) {
    hp.validate();
    const std::size_t n = beta.size();
    if (hp.init_scale > 0.0) {
        Rng rng(derive_seed(hp.seed, "optimizer"));
        std::normal_distribution<double> normal(0.0, hp.init_scale);
        for (double& b : beta) b += normal(rng);
    }
    std::vector<double> grad(n), m(n, 0.0), v(n, 0.0);
    AdamResult r;
    double b1t = 1.0, b2t = 1.0;
    double value = 0.0;
    for (int it = 0;; ++it) {
        value = f(beta, grad);
        double norm2 = 0.0;
        for (double g : grad) norm2 += g * g;
        if (!std::isfinite(value) || !std::isfinite(norm2)) {
            throw SolverError("ADAM: non-finite objective or gradient at iteration " + std::to_string(it), value);
        }
        if (it == 0) r.objective_start = value;
        if (std::sqrt(norm2) < hp.tol) {
            r.converged = true;
            r.iterations = it;
            break;
        }
        if (it == hp.max_iters) {
            r.iterations = it;
            break;
        }
        b1t *= hp.moment1;
        b2t *= hp.moment2;
        for (std::size_t k = 0; k < n; ++k) {
            m[k] = hp.moment1 * m[k] + (1.0 - hp.moment1) * grad[k];
            v[k] = hp.moment2 * v[k] + (1.0 - hp.moment2) * grad[k] * grad[k];
            const double m_hat = m[k] / (1.0 - b1t);
            const double v_hat = v[k] / (1.0 - b2t);
            beta[k] -= hp.learn_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
        }
    }
    r.objective_end = value;
    r.beta = std::move(beta);
    return r;
}

std::vector<double> rescale_coefficients(std::span<const double> beta) {
    if (beta.empty()) throw DimensionError("rescale: empty coefficient vector");
    double norm = 0.0;
    for (std::size_t k = 1; k < beta.size(); ++k) norm += std::abs(beta[k]);
    if (!(norm > 0.0)) throw DegenerateFitError("rescale: all non-intercept coefficients are zero");
    std::vector<double> out(beta.begin(), beta.end());
    for (double& b : out) b /= norm;
    return out;
}

double soft_ppd(std::span<const double> beta, const FeatureTensor& a, const Panel& returns, const HyperParams& hp,
                DayRange range) {
    check_shapes(beta, a, returns);
    range = clamp(range, a.days);
    double pnl = 0.0;
    std::size_t bet_days = 0;
    for (std::size_t d = range.begin; d < range.end; ++d) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a.assets; ++i) {
            const double f = returns(i, d);
            if (std::isnan(f)) continue;
            const double gi = activation_g(signal(beta, a, i, d), hp.alpha1);
            num += f * gi;
            den += std::abs(gi);
        }
        if (den > 0.0) {
            pnl += num / den;
            ++bet_days;
        }
    }
    return bet_days ? pnl / static_cast<double>(bet_days) : 0.0;
}

namespace {

std::vector<double> fit(const FeatureTensor& a, const Panel& returns, HyperParams hp, double lambda, DayRange range,
                        int* iterations) {
    hp.lambda = lambda;
    auto objective = [&](std::span<const double> beta, std::span<double> grad) {
        return soft_pnl_objective(beta, a, returns, hp, range, grad);
    };
    AdamResult r = adam_minimize(objective, std::vector<double>(a.features + 1, 0.0), hp);
    if (iterations) *iterations = r.iterations;
    return r.beta;
}

}  // namespace

std::vector<WindowResult> sliding_window_backtest(const FeatureTensor& a, const Panel& returns,
                                                  const WindowSpec& window, const HyperParams& hp) {
    hp.validate();
    if (window.train_len < 1 || window.test_len < 1) throw ConfigError("window lengths must be >= 1");
    if (returns.asset_count() != a.assets || returns.day_count() != a.days) {
        throw DimensionError("feature tensor and returns panel shapes differ");
    }
    if (hp.lambda_grid.empty()) throw ConfigError("lambda grid is empty");
    const std::size_t stride = window.stride ? window.stride : window.test_len;
    // Last day with any finite return.
    std::size_t last = 0;
    bool found = false;
    for (std::size_t d = a.days; d-- > 0 && !found;) {
        for (std::size_t i = 0; i < a.assets; ++i) {
            if (!std::isnan(returns(i, d))) {
                last = d;
                found = true;
                break;
            }
        }
    }
    if (!found || last + 1 < window.train_len + window.test_len) {
        throw DimensionError("sliding window: need at least train_len + test_len days with returns");
    }
    std::vector<std::size_t> ends;
    for (std::size_t e = window.train_len - 1; e + window.test_len <= last; e += stride) ends.push_back(e);

    std::vector<WindowResult> out(ends.size());
    parallel_for(ends.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            const std::size_t e = ends[w];
            const DayRange train{e + 1 - window.train_len, e + 1};
            const DayRange test{e + 1, e + 1 + window.test_len};
            const auto n_val = static_cast<std::size_t>(
                std::llround(hp.validation_fraction * static_cast<double>(window.train_len)));
            double best_lambda = hp.lambda_grid.front();
            if (hp.lambda_grid.size() > 1 && n_val >= 1 && n_val < window.train_len) {
                const DayRange fit_range{train.begin, train.end - n_val};
                const DayRange val_range{train.end - n_val, train.end};
                double best = -std::numeric_limits<double>::infinity();
                for (double lambda : hp.lambda_grid) {
                    const std::vector<double> beta = fit(a, returns, hp, lambda, fit_range, nullptr);
                    const double score = soft_ppd(beta, a, returns, hp, val_range);
                    if (score > best) {
                        best = score;
                        best_lambda = lambda;
                    }
                }
            }
            WindowResult r;
            r.end_day = e;
            r.end_date = returns.days[e];
            r.lambda = best_lambda;
            std::vector<double> beta = fit(a, returns, hp, best_lambda, train, &r.iterations);
            try {
                r.beta = rescale_coefficients(beta);
            } catch (const DegenerateFitError&) {
                r.beta = std::move(beta);
            }
            r.in_ppd = soft_ppd(r.beta, a, returns, hp, train);
            r.out_ppd = soft_ppd(r.beta, a, returns, hp, test);
            out[w] = std::move(r);
        }
    });
    return out;
}

}  // namespace ovi
