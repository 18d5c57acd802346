#include "ovi/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "ovi/error.hpp"

namespace ovi {

namespace {

class RowReader {
public:
    RowReader(std::vector<std::string_view> fields, std::size_t line)
        : fields_(std::move(fields)), line_(line) {}

    std::string_view text(std::size_t i, const char* name) const {
        if (fields_[i].empty()) throw ParseError(line_, std::string("empty field '") + name + "'");
        return fields_[i];
    }

    Date date(std::size_t i, const char* name) const {
        auto d = Date::parse(text(i, name));
        if (!d) throw ParseError(line_, std::string("bad date in '") + name + "'");
        return *d;
    }

    double real(std::size_t i, const char* name) const {
        const auto s = text(i, name);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ParseError(line_, std::string("bad number in '") + name + "'");
        }
        return v;
    }

    std::int64_t integer(std::size_t i, const char* name) const {
        const auto s = text(i, name);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ParseError(line_, std::string("bad integer in '") + name + "'");
        }
        return v;
    }

    template <typename T, typename F>
    T code(std::size_t i, const char* name, F&& decode) const {
        auto v = decode(text(i, name));
        if (!v) throw ParseError(line_, std::string("unknown code in '") + name + "'");
        return *v;
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::vector<std::string_view> fields_;
    std::size_t line_;
};

/// Reads the header and yields data rows with the expected field count.
template <typename F>
void for_each_row(std::istream& in, std::string_view header, F&& on_row) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    if (line != header) {
        throw ParseError(1, "header mismatch: expected '" + std::string(header) + "'");
    }
    const std::size_t n_fields = split_csv_line(header).size();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != n_fields) {
            throw ParseError(line_no, "expected " + std::to_string(n_fields) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        on_row(RowReader(std::move(fields), line_no));
    }
}

ContractKey read_contract(const RowReader& r, std::size_t underlying, std::size_t call_put,
                          std::size_t strike, std::size_t expiry) {
    ContractKey k;
    k.underlying = std::string(r.text(underlying, "underlying"));
    k.option_side = r.code<OptionSide>(call_put, "call_put", option_side_from_code);
    k.strike = r.real(strike, "strike");
    if (!(k.strike > 0.0)) throw ParseError(r.line(), "strike must be > 0");
    k.expiry = r.date(expiry, "expiry");
    return k;
}

}  // namespace

std::vector<std::string_view> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::vector<VolumeBucket> parse_intraday(std::istream& in, const IntradayCsvSchema& schema) {
    std::vector<VolumeBucket> rows;
    std::vector<std::size_t> lines;
    for_each_row(in, kIntradayHeader, [&](const RowReader& r) {
        VolumeBucket b;
        b.day = r.date(0, "date");
        const auto slot = r.integer(1, "slot");
        if (slot < 1 || slot > kSlotsPerDay) throw ParseError(r.line(), "slot outside 1..39");
        b.slot = static_cast<int>(slot);
        b.contract = read_contract(r, 2, 3, 4, 5);
        b.mpc = r.code<Mpc>(6, "mpc", mpc_from_code);
        b.trade_side = r.code<TradeSide>(7, "side", trade_side_from_code);
        b.intent = r.code<Intent>(8, "intent", intent_from_code);
        if ((b.intent == Intent::Unspecified) != (b.mpc == Mpc::MarketMaker)) {
            throw ParseError(r.line(), "intent must be NA exactly for MM rows");
        }
        b.cum_volume = r.integer(9, "cum_volume");
        b.cum_trades = r.integer(10, "cum_trades");
        if (b.cum_volume < 0 || b.cum_trades < 0) {
            throw ParseError(r.line(), "negative cumulative count");
        }
        b.exchange = schema.exchange;
        rows.push_back(std::move(b));
        lines.push_back(r.line());
    });

    // Cumulative monotonicity per (day, contract, mpc, side, intent).
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key = [&](std::size_t i) {
        const auto& b = rows[i];
        return std::tie(b.day, b.contract, b.mpc, b.trade_side, b.intent, b.slot);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& prev = rows[order[k - 1]];
        const auto& cur = rows[order[k]];
        const bool same = prev.day == cur.day && prev.contract == cur.contract &&
                          prev.mpc == cur.mpc && prev.trade_side == cur.trade_side &&
                          prev.intent == cur.intent;
        if (!same) continue;
        const std::string name = cur.day.iso() + " " + cur.contract.underlying + " " +
                                 std::string(to_code(cur.contract.option_side)) + " " +
                                 format_double(cur.contract.strike) + " " +
                                 cur.contract.expiry.iso() + " " + std::string(to_code(cur.mpc)) +
                                 " " + std::string(to_code(cur.trade_side)) + " " +
                                 std::string(to_code(cur.intent));
        if (prev.slot == cur.slot) {
            throw ValidationError("duplicate slot " + std::to_string(cur.slot) + " for key " + name +
                                  " (line " + std::to_string(lines[order[k]]) + ")");
        }
        if (!schema.allow_corrections &&
            (cur.cum_volume < prev.cum_volume || cur.cum_trades < prev.cum_trades)) {
            throw ValidationError("cumulative decrease at slot " + std::to_string(cur.slot) +
                                  " for key " + name + " (line " +
                                  std::to_string(lines[order[k]]) + ")");
        }
    }
    return rows;
}

std::vector<DailyOptionSummary> parse_daily_summary(std::istream& in) {
    std::vector<DailyOptionSummary> rows;
    for_each_row(in, kDailyHeader, [&](const RowReader& r) {
        DailyOptionSummary s;
        s.day = r.date(0, "date");
        s.contract = read_contract(r, 1, 2, 3, 4);
        s.open_px = r.real(5, "open");
        s.close_px = r.real(6, "close");
        s.low_px = r.real(7, "low");
        s.high_px = r.real(8, "high");
        s.open_interest = r.integer(9, "open_interest");
        s.total_volume = r.integer(10, "total_volume");
        if (s.low_px > s.high_px || s.low_px > std::min(s.open_px, s.close_px) ||
            std::max(s.open_px, s.close_px) > s.high_px) {
            throw ValidationError("line " + std::to_string(r.line()) +
                                  ": OHLC ordering violated (low <= open,close <= high)");
        }
        if (s.open_interest < 0) {
            throw ValidationError("line " + std::to_string(r.line()) + ": negative open interest");
        }
        if (s.total_volume < 0) {
            throw ValidationError("line " + std::to_string(r.line()) + ": negative total volume");
        }
        rows.push_back(std::move(s));
    });
    return rows;
}

std::vector<EquityBar> parse_equity_bars(std::istream& in) {
    std::vector<EquityBar> rows;
    std::map<std::pair<std::string, Date>, std::size_t> seen;
    for_each_row(in, kEquityHeader, [&](const RowReader& r) {
        EquityBar b;
        b.day = r.date(0, "date");
        b.asset = std::string(r.text(1, "asset"));
        b.open_px = r.real(2, "open");
        b.close_px = r.real(3, "close");
        if (!(b.open_px > 0.0) || !(b.close_px > 0.0)) {
            throw ValidationError("line " + std::to_string(r.line()) + ": prices must be > 0");
        }
        auto [it, inserted] = seen.try_emplace({b.asset, b.day}, r.line());
        if (!inserted) {
            throw ValidationError("line " + std::to_string(r.line()) + ": duplicate bar for (" +
                                  b.asset + ", " + b.day.iso() + "), first seen on line " +
                                  std::to_string(it->second));
        }
        rows.push_back(std::move(b));
    });
    return rows;
}

void write_intraday(std::ostream& out, std::span<const VolumeBucket> rows) {
    out << kIntradayHeader << '\n';
    for (const auto& b : rows) {
        out << b.day.iso() << ',' << b.slot << ',' << b.contract.underlying << ','
            << to_code(b.contract.option_side) << ',' << format_double(b.contract.strike) << ','
            << b.contract.expiry.iso() << ',' << to_code(b.mpc) << ',' << to_code(b.trade_side)
            << ',' << to_code(b.intent) << ',' << b.cum_volume << ',' << b.cum_trades << '\n';
    }
}

void write_daily_summary(std::ostream& out, std::span<const DailyOptionSummary> rows) {
    out << kDailyHeader << '\n';
    for (const auto& s : rows) {
        out << s.day.iso() << ',' << s.contract.underlying << ','
            << to_code(s.contract.option_side) << ',' << format_double(s.contract.strike) << ','
            << s.contract.expiry.iso() << ',' << format_double(s.open_px) << ','
            << format_double(s.close_px) << ',' << format_double(s.low_px) << ','
            << format_double(s.high_px) << ',' << s.open_interest << ',' << s.total_volume << '\n';
    }
}

void write_equity_bars(std::ostream& out, std::span<const EquityBar> rows) {
    out << kEquityHeader << '\n';
    for (const auto& b : rows) {
        out << b.day.iso() << ',' << b.asset << ',' << format_double(b.open_px) << ','
            << format_double(b.close_px) << '\n';
    }
}

void save_dataset(const MarketDataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [](const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + p.string());
        return f;
    };
    const auto buckets = data.buckets();
    for (const auto& label : data.exchanges()) {
        std::vector<VolumeBucket> rows;
        for (const auto& b : buckets) {
            if (b.exchange == label) rows.push_back(b);
        }
        auto f = open(dir / ("intraday_" + (label.empty() ? std::string("DEFAULT") : label) + ".csv"));
        write_intraday(f, rows);
    }
    {
        auto f = open(dir / "daily.csv");
        const auto rows = data.daily_summaries();
        write_daily_summary(f, rows);
    }
    {
        auto f = open(dir / "equity.csv");
        const auto rows = data.equity_bars();
        write_equity_bars(f, rows);
    }
}

MarketDataset load_dataset(const std::filesystem::path& dir, const DatasetOptions& options) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a dataset directory: " + dir.string());
    auto open = [](const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        if (!f) throw ConfigError("cannot read " + p.string());
        return f;
    };

    std::vector<std::filesystem::path> intraday_files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("intraday_") && name.ends_with(".csv")) {
            intraday_files.push_back(entry.path());
        }
    }
    std::sort(intraday_files.begin(), intraday_files.end());

    DatasetBuilder builder(options);
    for (const auto& path : intraday_files) {
        const auto name = path.filename().string();
        IntradayCsvSchema schema;
        schema.exchange = name.substr(9, name.size() - 9 - 4);
        schema.allow_corrections = options.clamp_corrections;
        auto f = open(path);
        for (const auto& b : parse_intraday(f, schema)) builder.add_bucket(b);
    }
    {
        auto f = open(dir / "daily.csv");
        for (const auto& s : parse_daily_summary(f)) builder.add_summary(s);
    }
    {
        auto f = open(dir / "equity.csv");
        for (const auto& e : parse_equity_bars(f)) builder.add_equity(e);
    }
    return std::move(builder).build();
}

}  // namespace ovi
