#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ovi/dataset.hpp"

namespace ovi {

struct FlowOptions {
    /// Match within (MPC, intent) classes instead of pooling intents: market makers form one
    /// class and every other MPC splits into opening and closing, giving 9 classes.
    bool partition_intent = false;
};

/// Buyer-class x seller-class nominal flow, tallied separately for calls and puts.
struct FlowMatrix {
    std::vector<std::string> labels;
    std::vector<double> call;  ///< row-major, buyer x seller
    std::vector<double> put;

    FlowMatrix() = default;
    explicit FlowMatrix(std::vector<std::string> class_labels)
        : labels(std::move(class_labels)),
          call(labels.size() * labels.size(), 0.0),
          put(labels.size() * labels.size(), 0.0) {}

    [[nodiscard]] std::size_t classes() const noexcept { return labels.size(); }
    [[nodiscard]] double& at(OptionSide side, std::size_t buyer, std::size_t seller) {
        return (side == OptionSide::Call ? call : put)[buyer * labels.size() + seller];
    }
    [[nodiscard]] double at(OptionSide side, std::size_t buyer, std::size_t seller) const {
        return (side == OptionSide::Call ? call : put)[buyer * labels.size() + seller];
    }
    /// Sum over both sides and all cells.
    [[nodiscard]] double total() const;
};

/// Class labels and the class of a (mpc, intent) pair under the given options.
std::vector<std::string> flow_class_labels(const FlowOptions& options);
std::size_t flow_class(Mpc mpc, Intent intent, const FlowOptions& options);

/// Proportional split of one window: out[b][s] += price * buy[b] * sell[s] / sum(sell).
/// Returns false, leaving `out` untouched, when buyers exist but the sell side is empty.
bool split_window(double price, std::span<const double> buy, std::span<const double> sell,
                  std::span<double> out);

struct DailyFlow {
    FlowMatrix matrix;
    std::size_t windows_without_sellers = 0;
    double buy_volume = 0.0;
    double sell_volume = 0.0;
    /// |buy - sell| / max(buy, sell), 0 on an empty day.
    [[nodiscard]] double mismatch() const;
};

DailyFlow daily_nominal_flow(const MarketDataset& data, DayIndex day, const FlowOptions& options = {});

struct FlowShare {
    FlowMatrix median;  ///< entrywise median of the daily normalized matrices
    std::size_t days_used = 0;
    std::size_t windows_without_sellers = 0;
    std::vector<double> daily_mismatch;  ///< per dataset day
};

/// Divides each day's matrix by its call + put total, then takes entrywise medians across the
/// days with nonzero flow. Throws ValidationError when no day has flow.
FlowShare median_flow_share(const MarketDataset& data, const FlowOptions& options = {});
/// Same from precomputed daily matrices.
FlowMatrix median_of_normalized(std::span<const FlowMatrix> days, std::size_t* days_used = nullptr);

/// Writes `buyer_mpc,seller_mpc,call_put,share`.
void write_flow_csv(std::ostream& out, const FlowMatrix& m);

}  // namespace ovi
