#pragma once

#include <span>
#include <vector>

#include "ovi/panel.hpp"

namespace ovi {

struct PcaResult {
    std::vector<double> ratios;        ///< explained-variance ratios, non-increasing, sum 1
    std::vector<double> eigenvalues;   ///< covariance eigenvalues, non-increasing
    std::size_t assets_used = 0;       ///< rows left after dropping fully missing ones
};

/// PCA of an asset x day matrix with days as observations. Rows that are entirely NaN are
/// dropped; remaining NaNs are replaced by their row mean. Throws DimensionError with fewer
/// than 2 usable rows or 2 days, and DegenerateFitError for a zero covariance matrix.
PcaResult pca_explained_variance(std::span<const double> values, std::size_t rows, std::size_t cols);
PcaResult pca_explained_variance(const Panel& panel);

}  // namespace ovi
