#include "ovi_cli/report.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "json.hpp"
#include "ovi/csv.hpp"
#include "ovi/error.hpp"

namespace ovi::cli {

namespace {

constexpr std::array<const char*, 5> kMetrics{"sr", "ppd", "p_value", "profitable_ratio", "n_avg"};
constexpr int kGroups = 5;

double metric(const ResultRow& r, std::size_t m) {
    switch (m) {
        case 0: return r.sr;
        case 1: return r.ppd;
        case 2: return r.p_value;
        case 3: return r.profitable_ratio;
        default: return r.n_avg;
    }
}

double parse_number(std::string_view s, std::size_t line) {
    if (s == "nan") return std::nan("");
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw ParseError(line, "bad number '" + std::string(s) + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(line, "bad number '" + std::string(s) + "'");
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << r.signal << ',' << r.mpc << ',' << r.group << ',' << r.scheme << ',' << r.mode << ','
            << format_double(r.sr) << ',' << format_double(r.ppd) << ',' << format_double(r.p_value) << ','
            << format_double(r.profitable_ratio) << ',' << format_double(r.n_avg) << ',' << r.trading_days
            << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line).size() != 11 || line.rfind(kResultsHeader, 0) != 0) {
        throw ParseError(1, std::string("expected header ") + kResultsHeader);
    }
    std::vector<ResultRow> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw ParseError(n, "expected 11 fields");
        ResultRow r;
        r.signal = f[0];
        r.mpc = f[1];
        r.group = static_cast<int>(parse_number(f[2], n));
        r.scheme = f[3];
        r.mode = f[4];
        r.sr = parse_number(f[5], n);
        r.ppd = parse_number(f[6], n);
        r.p_value = parse_number(f[7], n);
        r.profitable_ratio = parse_number(f[8], n);
        r.n_avg = parse_number(f[9], n);
        r.trading_days = static_cast<std::size_t>(parse_number(f[10], n));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_cumulative_pnl(std::ostream& out, const PnlSeries& p) {
    out << "date,cum_pnl\n";
    double cum = 0.0;
    for (std::size_t d = 0; d < p.size(); ++d) {
        cum += p.daily[d];
        out << p.days[d].iso() << ',' << format_double(cum) << '\n';
    }
}

std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                                               const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    // (signal, scheme, mode, mpc) -> per-group row pointer, in first-seen order.
    using Key = std::tuple<std::string, std::string, std::string, std::string>;
    std::vector<Key> order;
    std::map<Key, std::array<const ResultRow*, kGroups>> cells;
    for (const auto& r : rows) {
        if (r.group < 1 || r.group > kGroups) throw ValidationError("result group out of range");
        const Key k{r.signal, r.scheme, r.mode, r.mpc};
        auto [it, fresh] = cells.try_emplace(k);
        if (fresh) {
            it->second.fill(nullptr);
            order.push_back(k);
        }
        it->second[static_cast<std::size_t>(r.group - 1)] = &r;
    }

    std::vector<std::filesystem::path> written;
    if (format == ReportFormat::Csv) {
        for (std::size_t m = 0; m < kMetrics.size(); ++m) {
            const auto path = dir / (std::string("grid_") + kMetrics[m] + ".csv");
            auto out = open_out(path);
            out << "signal,scheme,mode,mpc,Q1,Q2,Q3,Q4,Q5\n";
            for (const auto& k : order) {
                out << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',' << std::get<3>(k);
                for (const ResultRow* r : cells.at(k)) out << ',' << (r ? format_double(metric(*r, m)) : "");
                out << '\n';
            }
            written.push_back(path);
        }
    } else {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (std::size_t m = 0; m < kMetrics.size(); ++m) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& k : order) {
                nlohmann::ordered_json e{{"signal", std::get<0>(k)},
                                         {"scheme", std::get<1>(k)},
                                         {"mode", std::get<2>(k)},
                                         {"mpc", std::get<3>(k)}};
                const auto& g = cells.at(k);
                for (int q = 0; q < kGroups; ++q) {
                    const ResultRow* r = g[static_cast<std::size_t>(q)];
                    e["Q" + std::to_string(q + 1)] = r ? nlohmann::ordered_json(metric(*r, m)) : nullptr;
                }
                arr.push_back(std::move(e));
            }
            j[kMetrics[m]] = std::move(arr);
        }
        const auto path = dir / "report.json";
        auto out = open_out(path);
        out << j.dump(2) << '\n';
        written.push_back(path);
    }
    return written;
}

}  // namespace ovi::cli
