#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ovi/types.hpp"

namespace ovi {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Dense asset x day matrix of doubles, stored asset-major. NaN marks a missing cell.
struct Panel {
    std::vector<Date> days;
    std::vector<std::string> assets;
    std::vector<double> values;

    Panel() = default;
    Panel(std::vector<Date> days_, std::vector<std::string> assets_, double fill = 0.0)
        : days(std::move(days_)), assets(std::move(assets_)), values(days.size() * assets.size(), fill) {}

    [[nodiscard]] std::size_t day_count() const noexcept { return days.size(); }
    [[nodiscard]] std::size_t asset_count() const noexcept { return assets.size(); }

    [[nodiscard]] double& operator()(std::size_t asset, std::size_t day) {
        return values[asset * days.size() + day];
    }
    [[nodiscard]] double operator()(std::size_t asset, std::size_t day) const {
        return values[asset * days.size() + day];
    }
    [[nodiscard]] std::span<const double> row(std::size_t asset) const {
        return {values.data() + asset * days.size(), days.size()};
    }
    [[nodiscard]] std::span<double> row(std::size_t asset) {
        return {values.data() + asset * days.size(), days.size()};
    }

    /// Same day and asset labels, in the same order.
    [[nodiscard]] bool aligned_with(const Panel& other) const {
        return days == other.days && assets == other.assets;
    }
};

}  // namespace ovi
