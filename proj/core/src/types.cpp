#include "ovi/types.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace ovi {

namespace {

template <typename T>
bool parse_uint(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const sys_days d = std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day};
    return Date(static_cast<std::int32_t>(d.time_since_epoch().count()));
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_uint(iso.substr(0, 4), y) || !parse_uint(iso.substr(5, 2), m) ||
        !parse_uint(iso.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return from_ymd(y, m, d);
}

std::string Date::iso() const {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string_view to_code(Mpc m) noexcept {
    switch (m) {
        case Mpc::Firm: return "FIRM";
        case Mpc::Broker: return "BROKER";
        case Mpc::MarketMaker: return "MM";
        case Mpc::Customer: return "CUST";
        case Mpc::ProfessionalCustomer: return "PROCUST";
    }
    return "?";
}

std::optional<Mpc> mpc_from_code(std::string_view code) noexcept {
    for (Mpc m : kAllMpcs) {
        if (to_code(m) == code) return m;
    }
    return std::nullopt;
}

std::string_view to_name(Mpc m) noexcept {
    switch (m) {
        case Mpc::Firm: return "Firm";
        case Mpc::Broker: return "Broker";
        case Mpc::MarketMaker: return "MarketMaker";
        case Mpc::Customer: return "Customer";
        case Mpc::ProfessionalCustomer: return "ProfessionalCustomer";
    }
    return "?";
}

std::optional<Mpc> mpc_from_name(std::string_view name) noexcept {
    for (Mpc m : kAllMpcs) {
        if (to_name(m) == name || to_code(m) == name) return m;
    }
    return std::nullopt;
}

std::string_view to_code(OptionSide s) noexcept { return s == OptionSide::Call ? "C" : "P"; }

std::optional<OptionSide> option_side_from_code(std::string_view code) noexcept {
    if (code == "C") return OptionSide::Call;
    if (code == "P") return OptionSide::Put;
    return std::nullopt;
}

std::string_view to_code(TradeSide s) noexcept { return s == TradeSide::Buy ? "BUY" : "SELL"; }

std::optional<TradeSide> trade_side_from_code(std::string_view code) noexcept {
    if (code == "BUY") return TradeSide::Buy;
    if (code == "SELL") return TradeSide::Sell;
    return std::nullopt;
}

std::string_view to_code(Intent i) noexcept {
    switch (i) {
        case Intent::Open: return "OPEN";
        case Intent::Close: return "CLOSE";
        case Intent::Unspecified: return "NA";
    }
    return "?";
}

std::optional<Intent> intent_from_code(std::string_view code) noexcept {
    if (code == "OPEN") return Intent::Open;
    if (code == "CLOSE") return Intent::Close;
    if (code == "NA") return Intent::Unspecified;
    return std::nullopt;
}

}  // namespace ovi
