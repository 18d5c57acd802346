#include "ovi/returns.hpp"

#include "ovi/error.hpp"

namespace ovi {

std::string ReturnMode::id() const {
    std::string s = basis == ReturnBasis::ExcessMarket ? "EMR_" : "";
    switch (span) {
        case ReturnSpan::CL_tmCL: return s + "CL_tmCL";
        case ReturnSpan::tmOP_tmCL: return s + "tmOP_tmCL";
        case ReturnSpan::CL_tmOP: return s + "CL_tmOP";
    }
    return s;
}

ReturnMode ReturnMode::parse(std::string_view text) {
    ReturnMode m;
    m.basis = ReturnBasis::Raw;
    if (text.starts_with("EMR_")) {
        m.basis = ReturnBasis::ExcessMarket;
        text.remove_prefix(4);
    }
    if (text == "CL_tmCL") m.span = ReturnSpan::CL_tmCL;
    else if (text == "tmOP_tmCL") m.span = ReturnSpan::tmOP_tmCL;
    else if (text == "CL_tmOP") m.span = ReturnSpan::CL_tmOP;
    else throw ConfigError("unknown return mode '" + std::string(text) + "'");
    return m;
}

double span_return(ReturnSpan span, const EquityQuote& today, const EquityQuote& next) noexcept {
    switch (span) {
        case ReturnSpan::CL_tmCL: return (next.close_px - today.close_px) / today.close_px;
        case ReturnSpan::tmOP_tmCL: return (next.close_px - next.open_px) / next.open_px;
        case ReturnSpan::CL_tmOP: return (next.open_px - today.close_px) / today.close_px;
    }
    return kNaN;
}

ReturnsPanel compute_returns(const MarketDataset& data, ReturnMode mode) {
    const bool excess = mode.basis == ReturnBasis::ExcessMarket;
    if (excess && !data.has_full_benchmark()) {
        throw ConfigError("excess-market returns need benchmark '" + data.benchmark() + "' on every day");
    }
    ReturnsPanel out{Panel(data.days(), data.assets(), kNaN), mode};
    const std::size_t n_days = data.day_count();
    for (AssetIndex a = 0; a < data.asset_count(); ++a) {
        for (DayIndex d = 0; d + 1 < n_days; ++d) {
            const auto today = data.equity(a, d);
            const auto next = data.equity(a, d + 1);
            if (!today || !next) continue;
            double r = span_return(mode.span, *today, *next);
            if (excess) r -= span_return(mode.span, *data.benchmark_quote(d), *data.benchmark_quote(d + 1));
            out.values(a, d) = r;
        }
    }
    return out;
}

}  // namespace ovi
