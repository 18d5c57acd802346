#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ovi {

/// Calendar date stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, unsigned month, unsigned day);
    /// Parses YYYY-MM-DD; returns nullopt on anything else.
    static std::optional<Date> parse(std::string_view iso);

    [[nodiscard]] constexpr std::int32_t days_since_epoch() const noexcept { return days_; }
    [[nodiscard]] std::string iso() const;

    constexpr auto operator<=>(const Date&) const = default;

    friend constexpr std::int32_t operator-(Date a, Date b) noexcept { return a.days_ - b.days_; }
    friend constexpr Date operator+(Date a, std::int32_t n) noexcept { return Date(a.days_ + n); }

private:
    std::int32_t days_ = 0;
};

/// Market participant classes as reported by the exchange.
enum class Mpc : std::uint8_t { Firm, Broker, MarketMaker, Customer, ProfessionalCustomer };

inline constexpr std::array<Mpc, 5> kAllMpcs{Mpc::Firm, Mpc::Broker, Mpc::MarketMaker,
                                             Mpc::Customer, Mpc::ProfessionalCustomer};
inline constexpr std::size_t kMpcCount = kAllMpcs.size();

enum class OptionSide : std::uint8_t { Call, Put };
enum class TradeSide : std::uint8_t { Buy, Sell };
enum class Intent : std::uint8_t { Open, Close, Unspecified };

/// Number of 10-minute reports per session (09:40 .. 16:00).
inline constexpr int kSlotsPerDay = 39;

[[nodiscard]] constexpr std::size_t index(Mpc m) noexcept { return static_cast<std::size_t>(m); }

/// Wire codes: FIRM, BROKER, MM, CUST, PROCUST.
std::string_view to_code(Mpc m) noexcept;
std::optional<Mpc> mpc_from_code(std::string_view code) noexcept;
/// Human-readable name ("MarketMaker").
std::string_view to_name(Mpc m) noexcept;
std::optional<Mpc> mpc_from_name(std::string_view name) noexcept;

std::string_view to_code(OptionSide s) noexcept;  // C / P
std::optional<OptionSide> option_side_from_code(std::string_view code) noexcept;
std::string_view to_code(TradeSide s) noexcept;  // BUY / SELL
std::optional<TradeSide> trade_side_from_code(std::string_view code) noexcept;
std::string_view to_code(Intent i) noexcept;  // OPEN / CLOSE / NA
std::optional<Intent> intent_from_code(std::string_view code) noexcept;

struct ContractKey {
    std::string underlying;
    OptionSide option_side = OptionSide::Call;
    double strike = 0.0;
    Date expiry;

    auto operator<=>(const ContractKey&) const = default;
};

/// One row of the cumulative intraday volume report.
struct VolumeBucket {
    Date day;
    int slot = 1;
    ContractKey contract;
    Mpc mpc = Mpc::Customer;
    TradeSide trade_side = TradeSide::Buy;
    Intent intent = Intent::Open;
    std::int64_t cum_volume = 0;
    std::int64_t cum_trades = 0;
    std::string exchange;

    bool operator==(const VolumeBucket&) const = default;
};

struct DailyOptionSummary {
    Date day;
    ContractKey contract;
    double open_px = 0.0;
    double close_px = 0.0;
    double low_px = 0.0;
    double high_px = 0.0;
    std::int64_t open_interest = 0;
    std::int64_t total_volume = 0;

    /// Average of open and close; the per-contract-day option price.
    [[nodiscard]] double mid_px() const noexcept { return 0.5 * (open_px + close_px); }

    bool operator==(const DailyOptionSummary&) const = default;
};

struct EquityBar {
    std::string asset;
    Date day;
    double open_px = 0.0;
    double close_px = 0.0;

    bool operator==(const EquityBar&) const = default;
};

}  // namespace ovi
