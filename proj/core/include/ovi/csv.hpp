#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovi/dataset.hpp"
#include "ovi/types.hpp"

namespace ovi {

inline constexpr std::string_view kIntradayHeader =
    "date,slot,underlying,call_put,strike,expiry,mpc,side,intent,cum_volume,cum_trades";
inline constexpr std::string_view kDailyHeader =
    "date,underlying,call_put,strike,expiry,open,close,low,high,open_interest,total_volume";
inline constexpr std::string_view kEquityHeader = "date,asset,open,close";

/// How to read one intraday report file. The wire format has no exchange column, so the
/// exchange label is a property of the file.
struct IntradayCsvSchema {
    std::string exchange = "PHLX";
    /// Accept cumulative decreases instead of failing; the dataset builder clamps them.
    bool allow_corrections = false;
};

std::vector<VolumeBucket> parse_intraday(std::istream& in, const IntradayCsvSchema& schema = {});
std::vector<DailyOptionSummary> parse_daily_summary(std::istream& in);
std::vector<EquityBar> parse_equity_bars(std::istream& in);

void write_intraday(std::ostream& out, std::span<const VolumeBucket> rows);
void write_daily_summary(std::ostream& out, std::span<const DailyOptionSummary> rows);
void write_equity_bars(std::ostream& out, std::span<const EquityBar> rows);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Splits on commas; strips a trailing carriage return.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Dataset directory layout: intraday_<EXCHANGE>.csv (one per exchange), daily.csv, equity.csv.
void save_dataset(const MarketDataset& data, const std::filesystem::path& dir);
MarketDataset load_dataset(const std::filesystem::path& dir, const DatasetOptions& options = {});

}  // namespace ovi
