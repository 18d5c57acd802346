#include "ovi/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ovi/csv.hpp"
#include "ovi/error.hpp"
#include "ovi/parallel.hpp"

namespace ovi {

double FlowMatrix::total() const {
    double t = 0.0;
    for (double v : call) t += v;
    for (double v : put) t += v;
    return t;
}

std::vector<std::string> flow_class_labels(const FlowOptions& options) {
    std::vector<std::string> labels;
    for (Mpc m : kAllMpcs) {
        if (!options.partition_intent || m == Mpc::MarketMaker) {
            labels.emplace_back(to_code(m));
        } else {
            labels.push_back(std::string(to_code(m)) + "_OPEN");
            labels.push_back(std::string(to_code(m)) + "_CLOSE");
        }
    }
    return labels;
}

std::size_t flow_class(Mpc mpc, Intent intent, const FlowOptions& options) {
    if (!options.partition_intent) return index(mpc);
    std::size_t c = 0;
    for (Mpc m : kAllMpcs) {
        if (m == mpc) {
            if (m == Mpc::MarketMaker) return c;
            return c + (intent == Intent::Close ? 1 : 0);
        }
        c += m == Mpc::MarketMaker ? 1 : 2;
    }
    return c;
}

bool split_window(double price, std::span<const double> buy, std::span<const double> sell, std::span<double> out) {
    const std::size_t n = buy.size();
    double sell_total = 0.0, buy_total = 0.0;
    for (double s : sell) sell_total += s;
    for (double b : buy) buy_total += b;
    if (sell_total <= 0.0) return buy_total <= 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        if (buy[b] <= 0.0) continue;
        const double scale = price * buy[b] / sell_total;
        for (std::size_t s = 0; s < sell.size(); ++s) out[b * sell.size() + s] += scale * sell[s];
    }
    return true;
}

double DailyFlow::mismatch() const {
    const double hi = std::max(buy_volume, sell_volume);
    return hi > 0.0 ? std::abs(buy_volume - sell_volume) / hi : 0.0;
}

DailyFlow daily_nominal_flow(const MarketDataset& data, DayIndex day, const FlowOptions& options) {
    if (day >= data.day_count()) throw DimensionError("daily_nominal_flow: day index out of range");
    DailyFlow out{FlowMatrix(flow_class_labels(options))};
    const std::size_t nc = out.matrix.classes();
    std::vector<double> buy(nc * kSlotsPerDay), sell(nc * kSlotsPerDay);
    std::array<double, kSlotsPerDay> windows{};
    std::vector<double> wb(nc), ws(nc);

    for (AssetIndex a = 0; a < data.asset_count(); ++a) {
        const auto series = data.series(day, a);
        for (std::size_t i = 0; i < series.size();) {
            const ContractId c = series[i].contract;
            std::fill(buy.begin(), buy.end(), 0.0);
            std::fill(sell.begin(), sell.end(), 0.0);
            for (; i < series.size() && series[i].contract == c; ++i) {
                const FlowSeries& s = series[i];
                data.window_volumes(s, windows);
                const std::size_t cls = flow_class(s.mpc, s.intent, options);
                std::vector<double>& dst = s.side == TradeSide::Buy ? buy : sell;
                for (int t = 0; t < kSlotsPerDay; ++t) dst[cls * kSlotsPerDay + t] += windows[t];
            }
            const SummaryRecord* sum = data.summary(day, c);
            const double price = sum ? sum->mid_px() : 0.0;
            const OptionSide side = data.contract(c).option_side;
            std::vector<double>& cells = side == OptionSide::Call ? out.matrix.call : out.matrix.put;
            for (int t = 0; t < kSlotsPerDay; ++t) {
                for (std::size_t k = 0; k < nc; ++k) {
                    wb[k] = buy[k * kSlotsPerDay + t];
                    ws[k] = sell[k * kSlotsPerDay + t];
                    out.buy_volume += wb[k];
                    out.sell_volume += ws[k];
                }
                if (!split_window(price, wb, ws, cells)) ++out.windows_without_sellers;
            }
        }
    }
    return out;
}

FlowMatrix median_of_normalized(std::span<const FlowMatrix> days, std::size_t* days_used) {
    if (days.empty()) throw ValidationError("flow share: no days");
    FlowMatrix result(days.front().labels);
    const std::size_t cells = result.call.size();
    std::vector<std::vector<double>> samples(2 * cells);
    std::size_t used = 0;
    for (const FlowMatrix& m : days) {
        if (m.labels != result.labels) throw DimensionError("flow share: class layouts differ");
        const double total = m.total();
        if (!(total > 0.0)) continue;
        ++used;
        for (std::size_t c = 0; c < cells; ++c) {
            samples[c].push_back(m.call[c] / total);
            samples[cells + c].push_back(m.put[c] / total);
        }
    }
    if (used == 0) throw ValidationError("flow share: no day has nonzero flow");
    auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    for (std::size_t c = 0; c < cells; ++c) {
        result.call[c] = median(samples[c]);
        result.put[c] = median(samples[cells + c]);
    }
    if (days_used) *days_used = used;
    return result;
}

FlowShare median_flow_share(const MarketDataset& data, const FlowOptions& options) {
    std::vector<DailyFlow> daily(data.day_count());
    parallel_for(data.day_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) daily[d] = daily_nominal_flow(data, static_cast<DayIndex>(d), options);
    });
    FlowShare share;
    std::vector<FlowMatrix> matrices;
    matrices.reserve(daily.size());
    for (DailyFlow& d : daily) {
        share.windows_without_sellers += d.windows_without_sellers;
        share.daily_mismatch.push_back(d.mismatch());
        matrices.push_back(std::move(d.matrix));
    }
    if (matrices.empty()) throw ValidationError("flow share: dataset has no days");
    share.median = median_of_normalized(matrices, &share.days_used);
    return share;
}

void write_flow_csv(std::ostream& out, const FlowMatrix& m) {
    out << "buyer_mpc,seller_mpc,call_put,share\n";
    for (OptionSide side : {OptionSide::Call, OptionSide::Put}) {
        for (std::size_t b = 0; b < m.classes(); ++b) {
            for (std::size_t s = 0; s < m.classes(); ++s) {
                out << m.labels[b] << ',' << m.labels[s] << ',' << to_code(side) << ','
                    << format_double(m.at(side, b, s)) << '\n';
            }
        }
    }
}

}  // namespace ovi
