#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ovi/portfolio.hpp"

namespace ovi::cli {

inline constexpr const char* kResultsHeader =
    "signal,mpc,group,scheme,mode,sr,ppd,p_value,profitable_ratio,n_avg,trading_days";

/// One backtested strategy. Statistics are NaN when undefined for the series.
struct ResultRow {
    std::string signal;
    std::string mpc;
    int group = 1;
    std::string scheme;
    std::string mode;
    double sr = 0.0;
    double ppd = 0.0;
    double p_value = 0.0;
    double profitable_ratio = 0.0;
    double n_avg = 0.0;
    std::size_t trading_days = 0;
};

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

/// `date,cum_pnl` for plotting.
void write_cumulative_pnl(std::ostream& out, const PnlSeries& p);

enum class ReportFormat { Csv, Json };

/// Pivots results into MPC x group grids, one per metric and (signal, scheme, mode). CSV output
/// writes grid_<metric>.csv with columns signal,scheme,mode,mpc,Q1..Q5 (header only when there
/// are no results); JSON writes report.json. Returns the files written.
std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                                               const std::filesystem::path& dir);

}  // namespace ovi::cli
