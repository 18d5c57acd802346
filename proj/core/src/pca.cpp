#include "ovi/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ovi/error.hpp"

namespace ovi {

PcaResult pca_explained_variance(std::span<const double> values, std::size_t rows, std::size_t cols) {
    if (values.size() != rows * cols) throw DimensionError("PCA: value count does not match rows x cols");
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (!std::isnan(values[r * cols + c])) {
                keep.push_back(r);
                break;
            }
        }
    }
    if (keep.size() < 2 || cols < 2) throw DimensionError("PCA needs at least 2 non-empty rows and 2 columns");

    const auto n = static_cast<Eigen::Index>(keep.size());
    const auto t = static_cast<Eigen::Index>(cols);
    Eigen::MatrixXd x(n, t);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* row = values.data() + keep[static_cast<std::size_t>(i)] * cols;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!std::isnan(row[c])) {
                sum += row[c];
                ++count;
            }
        }
        const double mean = sum / static_cast<double>(count);
        for (Eigen::Index c = 0; c < t; ++c) {
            const double v = row[c];
            x(i, c) = std::isnan(v) ? 0.0 : v - mean;
        }
    }
    const Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(t - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DegenerateFitError("PCA: eigen decomposition failed");

    PcaResult out;
    out.assets_used = keep.size();
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues[static_cast<std::size_t>(i)] = std::max(solver.eigenvalues()(n - 1 - i), 0.0);
    }
    double total = 0.0;
    for (double v : out.eigenvalues) total += v;
    if (!(total > 0.0) || out.eigenvalues.front() <= 1e-14 * cov.diagonal().cwiseAbs().maxCoeff()) {
        throw DegenerateFitError("PCA: covariance matrix has rank 0");
    }
    out.ratios.reserve(out.eigenvalues.size());
    for (double v : out.eigenvalues) out.ratios.push_back(v / total);
    return out;
}

PcaResult pca_explained_variance(const Panel& panel) {
    return pca_explained_variance(panel.values, panel.asset_count(), panel.day_count());
}

}  // namespace ovi
