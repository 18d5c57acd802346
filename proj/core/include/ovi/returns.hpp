#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ovi/dataset.hpp"
#include "ovi/panel.hpp"

namespace ovi {

enum class ReturnSpan : std::uint8_t { CL_tmCL, tmOP_tmCL, CL_tmOP };
enum class ReturnBasis : std::uint8_t { Raw, ExcessMarket };

struct ReturnMode {
    ReturnSpan span = ReturnSpan::CL_tmOP;
    ReturnBasis basis = ReturnBasis::ExcessMarket;

    /// "CL_tmOP", "EMR_CL_tmOP", ...
    [[nodiscard]] std::string id() const;
    static ReturnMode parse(std::string_view text);

    bool operator==(const ReturnMode&) const = default;
};

/// Asset x day returns. Cell (i, d) is the return realized from day d into day d + 1, so the
/// last day is always NaN; missing bars also give NaN.
struct ReturnsPanel {
    Panel values;
    ReturnMode mode;
};

/// Throws ConfigError for ExcessMarket when the benchmark lacks a bar on any day.
ReturnsPanel compute_returns(const MarketDataset& data, ReturnMode mode);

/// Return of one span from two consecutive bars.
[[nodiscard]] double span_return(ReturnSpan span, const EquityQuote& today, const EquityQuote& next) noexcept;

}  // namespace ovi
