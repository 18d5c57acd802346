#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ovi/panel.hpp"

namespace ovi {

/// A_{i,d,k}: asset x day x feature array, feature index fastest.
struct FeatureTensor {
    std::size_t assets = 0;
    std::size_t days = 0;
    std::size_t features = 0;
    std::vector<double> values;
    std::vector<std::string> feature_ids;

    FeatureTensor() = default;
    FeatureTensor(std::size_t n_assets, std::size_t n_days, std::size_t n_features)
        : assets(n_assets), days(n_days), features(n_features), values(n_assets * n_days * n_features, 0.0) {}

    [[nodiscard]] double& at(std::size_t a, std::size_t d, std::size_t k) {
        return values[(a * days + d) * features + k];
    }
    [[nodiscard]] double at(std::size_t a, std::size_t d, std::size_t k) const {
        return values[(a * days + d) * features + k];
    }
};

/// Stacks aligned signal panels into a tensor. NaN signals become 0.
FeatureTensor stack_features(std::span<const Panel> panels, std::vector<std::string> ids = {});

struct HyperParams {
    double alpha1 = 10.0;     ///< activation sharpness
    double alpha2 = 1e-6;     ///< smooth-abs floor
    double lambda = 0.0;      ///< l1 weight used by a single fit
    std::vector<double> lambda_grid{0.0, 1e-3, 1e-2, 1e-1};
    double validation_fraction = 0.2;  ///< tail of each training window used to pick lambda
    double learn_rate = 1e-2;
    double moment1 = 0.9;
    double moment2 = 0.999;
    double epsilon = 1e-8;    ///< ADAM denominator guard
    int max_iters = 2000;
    double tol = 1e-8;        ///< stop when the gradient norm falls below this
    double init_scale = 0.0;  ///< sd of a random start; 0 starts from beta = 0
    std::uint64_t seed = 0;

    void validate() const;
};

/// g(x) = 2 (1 / (1 + e^{-a1 x}) - 1/2) = tanh(a1 x / 2).
[[nodiscard]] double activation_g(double x, double alpha1) noexcept;
[[nodiscard]] double activation_g_prime(double x, double alpha1) noexcept;
/// h(x) = sqrt(x^2 + a2).
[[nodiscard]] double smooth_abs_h(double x, double alpha2) noexcept;
[[nodiscard]] double smooth_abs_h_prime(double x, double alpha2) noexcept;

/// Half-open day range [begin, end) of the tensor and returns panel.
struct DayRange {
    std::size_t begin = 0;
    std::size_t end = static_cast<std::size_t>(-1);
};

/// L(beta) = -sum_d sum_i f_id g(s_id) / sum_j h(g(s_jd)) + lambda sum_{k>=1} h(beta_k), with
/// s_id = beta_0 + sum_k beta_k A_idk. Cells with a NaN return are skipped. `grad` (size K+1),
/// when non-empty, receives dL/dbeta.
double soft_pnl_objective(std::span<const double> beta, const FeatureTensor& a, const Panel& returns,
                          const HyperParams& hp, DayRange range = {}, std::span<double> grad = {});
std::vector<double> objective_gradient(std::span<const double> beta, const FeatureTensor& a, const Panel& returns,
                                       const HyperParams& hp, DayRange range = {});

/// Objective that writes its gradient into the second argument.
using ObjectiveFn = std::function<double(std::span<const double>, std::span<double>)>;

struct AdamResult {
    std::vector<double> beta;
    int iterations = 0;
    double objective_start = 0.0;
    double objective_end = 0.0;
    bool converged = false;  ///< gradient norm fell below tol
};

/// ADAM with bias correction. Throws SolverError if the objective or gradient becomes
/// non-finite.
AdamResult adam_minimize(const ObjectiveFn& f, std::vector<double> beta_init, const HyperParams& hp);

/// beta / sum_{k>=1} |beta_k|. Throws DegenerateFitError when every non-intercept entry is 0.
std::vector<double> rescale_coefficients(std::span<const double> beta);

/// Realized soft-bet P&L per dollar: sum_d sum_i f g(s) / sum_j |g(s_j)| over days with any bet,
/// divided by the number of such days.
double soft_ppd(std::span<const double> beta, const FeatureTensor& a, const Panel& returns,
                const HyperParams& hp, DayRange range);

struct WindowSpec {
    std::size_t train_len = 500;
    std::size_t test_len = 100;
    std::size_t stride = 0;  ///< 0 means test_len
};

struct WindowResult {
    std::size_t end_day = 0;  ///< last training day
    Date end_date;
    double lambda = 0.0;
    std::vector<double> beta;  ///< rescaled
    double in_ppd = 0.0;
    double out_ppd = 0.0;
    int iterations = 0;
};

/// Fits on days e-l+1..e and evaluates on e+1..e+T for every window end e with e + T at most
/// the last day with returns. Lambda is chosen from the grid by validation P&L on the last
/// `validation_fraction` of the training days, then the model is refit on the full window.
std::vector<WindowResult> sliding_window_backtest(const FeatureTensor& a, const Panel& returns,
                                                  const WindowSpec& window, const HyperParams& hp);

}  // namespace ovi
