// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ovi/bootstrap.hpp"
#include "ovi/flow.hpp"
#include "ovi/network.hpp"
#include "ovi/portfolio.hpp"
#include "ovi/pricing.hpp"
#include "ovi/regression.hpp"
#include "ovi/returns.hpp"
#include "ovi/signals.hpp"
#include "ovi/stats.hpp"
#include "ovi/synthetic.hpp"
#include "ovi_cli/cli.hpp"
#include "ovi_cli/config.hpp"

using namespace ovi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<Date> dates(std::size_t n) {
    std::vector<Date> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = Date::from_ymd(2020, 1, 1) + static_cast<std::int32_t>(i);
    return d;
}

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = synthetic_asset_name(i);
    return a;
}

const ReturnMode kOvernightExcess{ReturnSpan::CL_tmOP, ReturnBasis::ExcessMarket};

// Richardson-extrapolated central difference.
double derivative(const std::function<double(double)>& f, double x, double h) {
    auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double second_derivative(const std::function<double(double)>& f, double x, double h) {
    auto central = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// ---------------------------------------------------------------------------------------------
// AC1

Outcome gradient_correctness() {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> z(0.0, 1.0);
    HyperParams hp;
    hp.lambda = 0.01;
    const int instances = 120;
    double worst = 0.0;
    for (int it = 0; it < instances; ++it) {
        FeatureTensor a(5, 10, 3);
        for (auto& v : a.values) v = z(rng);
        Panel ret(dates(10), names(5));
        for (auto& v : ret.values) v = 0.02 * z(rng);
        std::vector<double> beta(4);
        for (auto& b : beta) b = 0.5 * z(rng);

        const std::vector<double> g = objective_gradient(beta, a, ret, hp);
        for (std::size_t k = 0; k < beta.size(); ++k) {
            auto along = [&](double x) {
                std::vector<double> b = beta;
                b[k] = x;
                return soft_pnl_objective(b, a, ret, hp);
            };
            const double fd = derivative(along, beta[k], 1e-6 * std::max(1.0, std::abs(beta[k])));
            worst = std::max(worst, std::abs(g[k] - fd) / std::max(std::abs(fd), 1e-6));
        }
    }
    return {worst <= 1e-5, std::to_string(instances) + " instances, max rel err " + fmt("%.2e", worst)};
}

// ---------------------------------------------------------------------------------------------
// AC2

double integrated_price(const BsInputs& in) {
    const double m = (in.rate - 0.5 * in.sigma * in.sigma) * in.tau;
    const double v = in.sigma * std::sqrt(in.tau);
    const double zstar = (std::log(in.strike / in.spot) - m) / v;
    const bool call = in.side == OptionSide::Call;
    auto integrand = [&](double z) {
        const double st = in.spot * std::exp(m + v * z);
        const double payoff = call ? std::max(st - in.strike, 0.0) : std::max(in.strike - st, 0.0);
        return payoff * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    };
    using Gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double integral = call ? Gk::integrate(integrand, zstar, 14.0, 15, 1e-15)
                                 : Gk::integrate(integrand, -14.0, zstar, 15, 1e-15);
    return std::exp(-in.rate * in.tau) * integral;
}

Outcome pricing() {
    Outcome o;
    std::ostringstream msg;

    BsInputs ref{100.0, 100.0, 1.0, 0.05, 0.2, OptionSide::Call};
    const double call = bs_price(ref), call_oracle = integrated_price(ref);
    ref.side = OptionSide::Put;
    const double put = bs_price(ref), put_oracle = integrated_price(ref);
    const double ref_err = std::max({std::abs(call - call_oracle), std::abs(put - put_oracle),
                                     std::abs(call - 10.4506), std::abs(put - 5.5735)});
    o.pass &= ref_err <= 1e-3;
    msg << "call " << fmt("%.4f", call) << " put " << fmt("%.4f", put) << " (oracle err " << fmt("%.1e", ref_err)
        << ")";

    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double parity = 0.0;
    for (int i = 0; i < 10000; ++i) {
        BsInputs in{20.0 + 180.0 * u(rng), 20.0 + 180.0 * u(rng), 0.02 + 3.0 * u(rng), 0.1 * u(rng),
                    0.05 + 1.95 * u(rng), OptionSide::Call};
        const double c = bs_price(in);
        in.side = OptionSide::Put;
        const double p = bs_price(in);
        parity = std::max(parity, std::abs(c - p - (in.spot - in.strike * std::exp(-in.rate * in.tau))));
    }
    o.pass &= parity <= 1e-12;
    msg << ", parity " << fmt("%.1e", parity);

    double greeks = 0.0;
    for (OptionSide side : {OptionSide::Call, OptionSide::Put}) {
        for (double mny : {0.9, 1.0, 1.1}) {
            for (double tau : {0.25, 1.0, 2.0}) {
                for (double sigma : {0.15, 0.3, 0.6}) {
                    const BsInputs base{100.0 * mny, 100.0, tau, 0.03, sigma, side};
                    const GreeksResult g = bs_greeks(base);
                    auto with = [&](auto set) {
                        return [=](double x) {
                            BsInputs in = base;
                            set(in, x);
                            return bs_price(in);
                        };
                    };
                    const auto by_spot = with([](BsInputs& in, double x) { in.spot = x; });
                    const double fd[5] = {
                        derivative(by_spot, base.spot, 1e-3 * base.spot),
                        second_derivative(by_spot, base.spot, 1e-2 * base.spot),
                        -derivative(with([](BsInputs& in, double x) { in.tau = x; }), tau, 1e-4),
                        derivative(with([](BsInputs& in, double x) { in.sigma = x; }), sigma, 1e-4),
                        derivative(with([](BsInputs& in, double x) { in.rate = x; }), 0.03, 1e-4),
                    };
                    const double an[5] = {g.delta, g.gamma, g.theta, g.vega, g.rho};
                    for (int k = 0; k < 5; ++k) {
                        greeks = std::max(greeks, std::abs(an[k] - fd[k]) / std::max(std::abs(fd[k]), 1e-8));
                    }
                }
            }
        }
    }
    o.pass &= greeks <= 1e-4;
    msg << ", greeks rel " << fmt("%.1e", greeks);

    double iv = 0.0;
    for (OptionSide side : {OptionSide::Call, OptionSide::Put}) {
        for (double mny : {0.9, 1.0, 1.1}) {
            for (double tau : {0.25, 1.0, 2.0}) {
                for (double sigma : {0.1, 0.2, 0.4, 0.8, 1.2, 1.7}) {
                    const BsInputs in{100.0 * mny, 100.0, tau, 0.05, sigma, side};
                    iv = std::max(iv, std::abs(implied_volatility(bs_price(in), in).sigma - sigma));
                }
            }
        }
    }
    o.pass &= iv <= 1e-6;
    msg << ", IV round trip " << fmt("%.1e", iv);
    o.detail = msg.str();
    return o;
}

// ---------------------------------------------------------------------------------------------
// AC3

struct FlowRecord {
    int contract;
    Mpc mpc;
    TradeSide side;
    Intent intent;
    std::string exchange;
    std::int64_t volume;
};

struct OviFixture {
    std::vector<OptionSide> contract_sides;
    std::vector<FlowRecord> records;
};

OviFixture random_fixture(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_contracts(1, 4), volume(0, 500);
    std::bernoulli_distribution coin(0.5), present(0.12), empty(0.1);
    OviFixture f;
    const int nc = n_contracts(rng);
    for (int c = 0; c < nc; ++c) f.contract_sides.push_back(coin(rng) ? OptionSide::Call : OptionSide::Put);
    if (empty(rng)) return f;
    for (int c = 0; c < nc; ++c) {
        for (Mpc m : kAllMpcs) {
            for (TradeSide s : {TradeSide::Buy, TradeSide::Sell}) {
                for (Intent in : {Intent::Open, Intent::Close}) {
                    if (m == Mpc::MarketMaker && in == Intent::Close) continue;
                    for (const char* ex : {"PHLX", "ISE"}) {
                        if (present(rng)) {
                            f.records.push_back({c, m, s, m == Mpc::MarketMaker ? Intent::Unspecified : in, ex,
                                                 volume(rng)});
                        }
                    }
                }
            }
        }
    }
    return f;
}

MarketDataset build_fixture(const OviFixture& f, bool flip, std::int64_t scale) {
    testing::MiniMarket mk({"AAA", "BBB"}, 1);
    std::vector<ContractKey> keys;
    for (std::size_t c = 0; c < f.contract_sides.size(); ++c) {
        keys.push_back(mk.contract("AAA", f.contract_sides[c], 90.0 + 5.0 * static_cast<double>(c)));
        mk.summary(0, keys.back(), 2.0, 2.0, 100);
    }
    // BBB reports only zero volume, so every one of its cells is 0/0.
    mk.flow(0, mk.contract("BBB", OptionSide::Call), Mpc::Firm, TradeSide::Buy, 0);
    for (const auto& r : f.records) {
        TradeSide side = r.side;
        if (flip) side = side == TradeSide::Buy ? TradeSide::Sell : TradeSide::Buy;
        mk.flow(0, keys[static_cast<std::size_t>(r.contract)], r.mpc, side, r.volume * scale, r.intent, kSlotsPerDay,
                r.exchange);
    }
    return std::move(mk).build();
}

DirectionalFlows oracle_flows(const OviFixture& f, Mpc m, const std::string& only_exchange = "",
                              int only_side = -1) {
    DirectionalFlows d;
    for (const auto& r : f.records) {
        if (r.mpc != m) continue;
        if (!only_exchange.empty() && r.exchange != only_exchange) continue;
        if (only_side >= 0 && static_cast<int>(r.side) != only_side) continue;
        const bool call = f.contract_sides[static_cast<std::size_t>(r.contract)] == OptionSide::Call;
        const bool buy = r.side == TradeSide::Buy;
        (call == buy ? d.up : d.down) += static_cast<double>(r.volume);
    }
    return d;
}

double oracle_ovi(const DirectionalFlows& d) {
    const double t = d.up + d.down;
    return t == 0.0 ? 0.0 : (d.up - d.down) / t;
}

Outcome ovi_properties() {
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<std::int64_t> scale(2, 9);
    const int fixtures = 10000;
    std::size_t violations = 0, zero_cells = 0;
    double worst = 0.0;
    auto check = [&](bool ok) { violations += ok ? 0 : 1; };
    auto same = [](DirectionalFlows a, DirectionalFlows b) { return a.up == b.up && a.down == b.down; };

    const FilterSpec all;
    FilterSpec buy_only, sell_only, phlx, ise;
    buy_only.side = SideRestriction::BuyOnly;
    sell_only.side = SideRestriction::SellOnly;
    phlx.exchanges = {"PHLX"};
    ise.exchanges = {"ISE"};

    for (int i = 0; i < fixtures; ++i) {
        const OviFixture f = random_fixture(rng);
        const std::int64_t k = scale(rng);
        const MarketDataset data = build_fixture(f, false, 1);
        const OviPanel base = compute_ovi(data, all);
        const OviPanel flipped = compute_ovi(build_fixture(f, true, 1), all);
        const OviPanel scaled = compute_ovi(build_fixture(f, false, k), all);
        const AssetIndex a = *data.asset_index("AAA");
        const AssetIndex b = *data.asset_index("BBB");

        for (Mpc m : kAllMpcs) {
            const double v = base.value(m, a, 0);
            const DirectionalFlows expected = oracle_flows(f, m);
            worst = std::max(worst, std::abs(v - oracle_ovi(expected)));
            check(v >= -1.0 && v <= 1.0);
            check(flipped.value(m, a, 0) == -v);
            check(std::abs(scaled.value(m, a, 0) - v) <= 1e-12);
            check(base.value(m, b, 0) == 0.0);
            if (expected.up + expected.down == 0.0) {
                check(v == 0.0);
                ++zero_cells;
            }

            const DirectionalFlows both = directional_flows(data, a, 0, m, all);
            const DirectionalFlows buys = directional_flows(data, a, 0, m, buy_only);
            const DirectionalFlows sells = directional_flows(data, a, 0, m, sell_only);
            check(same(both, expected));
            check(same(buys, oracle_flows(f, m, "", static_cast<int>(TradeSide::Buy))));
            check(same(sells, oracle_flows(f, m, "", static_cast<int>(TradeSide::Sell))));
            check(same(both, {buys.up + sells.up, buys.down + sells.down}));

            const DirectionalFlows p = directional_flows(data, a, 0, m, phlx);
            const DirectionalFlows e = directional_flows(data, a, 0, m, ise);
            check(same(p, oracle_flows(f, m, "PHLX")));
            check(same(both, {p.up + e.up, p.down + e.down}));
        }
    }
    const bool pass = violations == 0 && worst <= 1e-12 && zero_cells > 0;
    return {pass, std::to_string(fixtures) + " fixtures, " + std::to_string(violations) + " violations, max err vs oracle " +
                      fmt("%.1e", worst) + ", " + std::to_string(zero_cells) + " empty cells"};
}

// ---------------------------------------------------------------------------------------------
// AC4

Outcome planted_recovery() {
    const int seeds = 20;
    int mm_hits = 0, firm_null = 0, procust_null = 0;
    double mm_worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
        SynthConfig cfg;
        cfg.assets = 200;
        cfg.days = 750;
        cfg.seed = 4000 + static_cast<std::uint64_t>(s);
        cfg.rho[index(Mpc::MarketMaker)] = -0.3;
        const MarketDataset data = generate_synthetic_market(cfg);
        const OviPanel ovi = compute_ovi(data, FilterSpec{});
        const ReturnsPanel ret = compute_returns(data, kOvernightExcess);
        auto p_value = [&](Mpc m) {
            return sr_significance_test(pnl_series(ovi.mpc_panel(m), ret, StrategySpec{BetKind::Uniform, 3})).p_value;
        };
        const double mm = p_value(Mpc::MarketMaker);
        mm_worst = std::max(mm_worst, mm);
        if (mm < 0.01) ++mm_hits;
        if (p_value(Mpc::Firm) > 0.05) ++firm_null;
        if (p_value(Mpc::ProfessionalCustomer) > 0.05) ++procust_null;
    }
    const bool pass = mm_hits == seeds && firm_null >= 18 && procust_null >= 18;
    return {pass, "MM p<0.01 in " + std::to_string(mm_hits) + "/20 (max p " + fmt("%.1e", mm_worst) +
                      "), FIRM p>0.05 in " + std::to_string(firm_null) + "/20, PROCUST p>0.05 in " +
                      std::to_string(procust_null) + "/20"};
}

// ---------------------------------------------------------------------------------------------
// AC5

Outcome null_calibration() {
    const int series = 1000, pairs = 500;
    int sr_rejections = 0, diff_rejections = 0;
    for (int s = 0; s < series; ++s) {
        SynthConfig cfg;
        cfg.assets = 10;
        cfg.days = 253;
        cfg.seed = 50000 + static_cast<std::uint64_t>(s);
        cfg.mpcs = {Mpc::Firm, Mpc::ProfessionalCustomer};
        const MarketDataset data = generate_synthetic_market(cfg);
        const OviPanel ovi = compute_ovi(data, FilterSpec{});
        const ReturnsPanel ret = compute_returns(data, kOvernightExcess);
        const PnlSeries firm = pnl_series(ovi.mpc_panel(Mpc::Firm), ret, StrategySpec{BetKind::Uniform, 1});
        if (sr_significance_test(firm).p_value < 0.05) ++sr_rejections;
        if (s < pairs) {
            const PnlSeries pro =
                pnl_series(ovi.mpc_panel(Mpc::ProfessionalCustomer), ret, StrategySpec{BetKind::Uniform, 1});
            SrDifferenceOptions opt;
            opt.seed = static_cast<std::uint64_t>(s);
            if (sr_difference_test(firm, pro, opt).p_value < 0.05) ++diff_rejections;
        }
    }
    const double sr_rate = sr_rejections / static_cast<double>(series);
    const double diff_rate = diff_rejections / static_cast<double>(pairs);
    const bool pass = sr_rate >= 0.03 && sr_rate <= 0.07 && diff_rate >= 0.02 && diff_rate <= 0.09;
    return {pass, "SR test rejects " + fmt("%.1f%%", 100 * sr_rate) + " of 1000, SR difference rejects " +
                      fmt("%.1f%%", 100 * diff_rate) + " of 500"};
}

// ---------------------------------------------------------------------------------------------
// AC6

Outcome regression_recovery() {
    SynthConfig cfg;
    cfg.assets = 50;
    cfg.days = 1600;
    cfg.seed = 6006;
    cfg.rho[index(Mpc::MarketMaker)] = -0.3;
    const MarketDataset data = generate_synthetic_market(cfg);
    const OviPanel ovi = compute_ovi(data, FilterSpec{});
    std::vector<Panel> panels;
    std::vector<std::string> ids;
    for (Mpc m : kAllMpcs) {
        panels.push_back(ovi.mpc_panel(m));
        ids.emplace_back(to_code(m));
    }
    const FeatureTensor a = stack_features(panels, ids);
    const ReturnsPanel ret = compute_returns(data, kOvernightExcess);
    const std::vector<WindowResult> windows = sliding_window_backtest(a, ret.values, WindowSpec{}, HyperParams{});

    const std::size_t planted = 1 + index(Mpc::MarketMaker);
    std::size_t correct = 0;
    double ppd = 0.0;
    for (const auto& w : windows) {
        if (w.beta[planted] < 0.0) ++correct;
        ppd += w.out_ppd;
    }
    const double mean_ppd = windows.empty() ? 0.0 : ppd / static_cast<double>(windows.size());
    const bool pass = !windows.empty() && correct * 10 >= windows.size() * 9 && mean_ppd > 0.0;
    return {pass, "sign correct in " + std::to_string(correct) + "/" + std::to_string(windows.size()) +
                      " windows, mean out-of-sample PPD " + fmt("%.2e", mean_ppd)};
}

// ---------------------------------------------------------------------------------------------
// AC7

Outcome network_fwer() {
    const int seeds = 20;
    int quiet = 0, planted_found = 0;
    std::size_t max_edges = 0;
    for (int s = 0; s < seeds; ++s) {
        SynthConfig cfg;
        cfg.assets = 100;
        cfg.days = 750;
        cfg.seed = 7000 + static_cast<std::uint64_t>(s);
        cfg.mpcs = {Mpc::MarketMaker};
        const MarketDataset data = generate_synthetic_market(cfg);
        Panel signals = compute_ovi(data, FilterSpec{}).mpc_panel(Mpc::MarketMaker);
        const ReturnsPanel ret = compute_returns(data, kOvernightExcess);

        const ImpactNetwork noise = build_impact_network(signals, ret, SignificanceLevel::FullBonferroni);
        max_edges = std::max(max_edges, noise.edge_count());
        if (noise.edge_count() <= 1) ++quiet;

        for (std::size_t d = 0; d < signals.day_count(); ++d) {
            const double f = ret.values(1, d);
            signals(0, d) = std::isfinite(f) && f != 0.0 ? std::copysign(1.0, f) : 0.0;
        }
        if (build_impact_network(signals, ret, SignificanceLevel::FullBonferroni).edge(0, 1)) ++planted_found;
    }
    const ErExpectation er = er_expectation(1792, 1207, 1207);
    const bool er_ok = std::abs(er.self_loops - 0.67) <= 0.01 && std::abs(er.bidirected - 0.23) <= 0.01;
    const bool pass = quiet >= 19 && planted_found == seeds && er_ok;
    return {pass, "noise networks with <=1 edge " + std::to_string(quiet) + "/20 (max " + std::to_string(max_edges) +
                      "), planted edge " + std::to_string(planted_found) + "/20, ER self-loops " +
                      fmt("%.4f", er.self_loops) + " bidirected " + fmt("%.4f", er.bidirected)};
}

// ---------------------------------------------------------------------------------------------
// AC8

// Nominal volume per buyer class over windows that have sellers, recomputed from the raw series.
std::vector<double> matched_buyer_nominal(const MarketDataset& data, DayIndex day, const FlowOptions& opt) {
    const std::size_t nc = flow_class_labels(opt).size();
    std::vector<double> out(nc, 0.0);
    std::array<double, kSlotsPerDay> w{};
    for (AssetIndex a = 0; a < data.asset_count(); ++a) {
        const auto series = data.series(day, a);
        std::vector<ContractId> contracts;
        for (const auto& s : series) contracts.push_back(s.contract);
        contracts.erase(std::unique(contracts.begin(), contracts.end()), contracts.end());
        for (ContractId c : contracts) {
            std::vector<double> buy(nc * kSlotsPerDay, 0.0), sell_total(kSlotsPerDay, 0.0);
            for (const auto& s : series) {
                if (s.contract != c) continue;
                data.window_volumes(s, w);
                for (int t = 0; t < kSlotsPerDay; ++t) {
                    if (s.side == TradeSide::Buy) buy[flow_class(s.mpc, s.intent, opt) * kSlotsPerDay + t] += w[t];
                    else sell_total[t] += w[t];
                }
            }
            const double price = data.summary(day, c)->mid_px();
            for (int t = 0; t < kSlotsPerDay; ++t) {
                if (sell_total[t] <= 0.0) continue;
                for (std::size_t k = 0; k < nc; ++k) out[k] += price * buy[k * kSlotsPerDay + t];
            }
        }
    }
    return out;
}

Outcome flow_conservation() {
    Outcome o;
    std::ostringstream msg;

    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(0.0, 60.0);
    std::bernoulli_distribution present(0.6);
    double split_err = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        std::vector<double> buy(9), sell(9), out(81, 0.0);
        for (auto& b : buy) b = present(rng) ? std::floor(u(rng)) : 0.0;
        for (auto& s : sell) s = present(rng) ? std::floor(u(rng)) : 0.0;
        sell[static_cast<std::size_t>(rep) % 9] += 1.0;
        const double price = 0.01 + u(rng);
        split_window(price, buy, sell, out);
        for (std::size_t b = 0; b < 9; ++b) {
            double row = 0.0;
            for (std::size_t s = 0; s < 9; ++s) row += out[b * 9 + s];
            split_err = std::max(split_err, std::abs(row - price * buy[b]) / std::max(1.0, price * buy[b]));
        }
    }
    o.pass &= split_err <= 1e-12;
    msg << "window split err " << fmt("%.1e", split_err);

    SynthConfig cfg;
    cfg.assets = 15;
    cfg.days = 40;
    cfg.seed = 88;
    cfg.exchanges = {"PHLX", "ISE"};
    const MarketDataset data = generate_synthetic_market(cfg);
    double day_err = 0.0, norm_err = 0.0;
    for (bool partition : {false, true}) {
        const FlowOptions opt{partition};
        for (DayIndex d = 0; d < data.day_count(); ++d) {
            const DailyFlow flow = daily_nominal_flow(data, d, opt);
            const std::vector<double> expected = matched_buyer_nominal(data, d, opt);
            for (std::size_t b = 0; b < flow.matrix.classes(); ++b) {
                double row = 0.0;
                for (std::size_t s = 0; s < flow.matrix.classes(); ++s) {
                    row += flow.matrix.at(OptionSide::Call, b, s) + flow.matrix.at(OptionSide::Put, b, s);
                }
                day_err = std::max(day_err, std::abs(row - expected[b]) / std::max(1.0, expected[b]));
            }
            if (flow.matrix.total() > 0.0) {
                const FlowMatrix normalized = median_of_normalized(std::span<const FlowMatrix>(&flow.matrix, 1));
                norm_err = std::max(norm_err, std::abs(normalized.total() - 1.0));
            }
        }
    }
    o.pass &= day_err <= 1e-12 && norm_err <= 1e-12;
    msg << ", daily buyer conservation err " << fmt("%.1e", day_err) << ", normalized sum err "
        << fmt("%.1e", norm_err);

    const FlowOptions pooled;
    const std::size_t mm = flow_class(Mpc::MarketMaker, Intent::Unspecified, pooled);
    const std::size_t firm = flow_class(Mpc::Firm, Intent::Open, pooled);
    const std::size_t cust = flow_class(Mpc::Customer, Intent::Open, pooled);
    {
        testing::MiniMarket mk({"AAA"}, 1);
        const auto c = mk.contract("AAA", OptionSide::Call);
        mk.summary(0, c, 2.0, 2.0, 100);
        mk.flow(0, c, Mpc::MarketMaker, TradeSide::Buy, 10);
        mk.flow(0, c, Mpc::Firm, TradeSide::Sell, 10);
        const DailyFlow f = daily_nominal_flow(std::move(mk).build(), 0);
        const bool ok = f.matrix.at(OptionSide::Call, mm, firm) == 20.0 && f.matrix.total() == 20.0;
        o.pass &= ok;
        msg << ", unique-match fixture " << (ok ? "ok" : "MISMATCH");
    }
    {
        testing::MiniMarket mk({"AAA"}, 1);
        const auto p = mk.contract("AAA", OptionSide::Put);
        mk.summary(0, p, 1.0, 1.0, 100);
        mk.flow(0, p, Mpc::Customer, TradeSide::Buy, 10);
        mk.flow(0, p, Mpc::Firm, TradeSide::Sell, 3);
        mk.flow(0, p, Mpc::MarketMaker, TradeSide::Sell, 7);
        const DailyFlow f = daily_nominal_flow(std::move(mk).build(), 0);
        const bool ok = std::abs(f.matrix.at(OptionSide::Put, cust, firm) - 3.0) <= 1e-12 &&
                        std::abs(f.matrix.at(OptionSide::Put, cust, mm) - 7.0) <= 1e-12;
        o.pass &= ok;
        msg << ", proportional-split fixture " << (ok ? "ok" : "MISMATCH");
    }
    o.detail = msg.str();
    return o;
}

// ---------------------------------------------------------------------------------------------
// AC9

Outcome defaults_audit() {
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };
    const WindowSpec w;
    const HyperParams hp;
    const LiquidityOptions liq;
    const cli::RunConfig cfg;
    expect(w.train_len == 500 && cfg.train_len == 500, "l=500");
    expect(w.test_len == 100 && cfg.test_len == 100, "T=100");
    expect(kTradingDaysPerYear == 252.0, "252 days per year");
    expect(hp.moment1 == 0.9 && hp.moment2 == 0.999, "ADAM moments");
    expect(cfg.hyper.moment1 == 0.9 && cfg.hyper.moment2 == 0.999, "config ADAM moments");
    expect(liq.iv_cap == 2.0 && cfg.iv_cap == 2.0, "IV cap 2");

    // Annualization is sqrt(252) on the n-1 sd.
    PnlSeries p;
    p.daily = {0.01, -0.02, 0.03, 0.015, -0.005, 0.02};
    p.gross.assign(p.daily.size(), 1.0);
    p.n_assets.assign(p.daily.size(), 1);
    p.days = dates(p.daily.size());
    double mean = 0.0, ss = 0.0;
    for (double x : p.daily) mean += x / 6.0;
    for (double x : p.daily) ss += (x - mean) * (x - mean);
    const double sr = mean / std::sqrt(ss / 5.0) * std::sqrt(252.0);
    expect(std::abs(performance_summary(p).sharpe - sr) <= 1e-12 * std::abs(sr), "annualized SR");

    cli::RunConfig custom;
    custom.seed = 17;
    custom.train_len = 250;
    custom.hyper.alpha1 = 4.0;
    custom.hyper.lambda_grid = {0.0, 0.25};
    custom.rho = {{"MM", -0.3}};
    custom.filters = {"kind=nominal;side=buy", "iv_bucket=4"};
    custom.intraday = {{"ISE", "ise.csv"}};
    const fs::path dir = testing::temp_dir("acceptance_config");
    std::ofstream(dir / "cfg.json") << cli::to_json(custom).dump(2);
    const cli::RunConfig loaded = cli::load_config_file(dir / "cfg.json");
    expect(cli::to_json(loaded).dump() == cli::to_json(custom).dump(), "config file round trip");
    cli::RunConfig back;
    cli::apply_json(nlohmann::json::parse(cli::to_json(cfg).dump()), back);
    expect(cli::to_json(back).dump() == cli::to_json(cfg).dump(), "defaults round trip");

    std::string detail = "defaults l=500 T=100 sqrt(252) ADAM(0.9, 0.999) IV cap 2, config round trip";
    if (!bad.empty()) {
        detail = "failed:";
        for (const auto& b : bad) detail += " [" + b + "]";
    }
    return {bad.empty(), detail};
}

// ---------------------------------------------------------------------------------------------
// AC10

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const std::vector<std::vector<std::string>> pipeline{
        {"synth", "--assets", "30", "--days", "160", "--seed", "10", "--rho", "MM=-0.3", "--out", "data"},
        {"ovi", "--data", "data", "--out", "signals", "--filter", "kind=volume", "--filter", "iv_bucket=4"},
        {"backtest", "--data", "data", "--out", "backtest", "--scheme", "uniform", "--scheme", "volume"},
        {"regress", "--data", "data", "--out", "regress", "--train-len", "60", "--test-len", "20", "--max-iters",
         "300"},
        {"flow", "--data", "data", "--out", "flow"},
        {"network", "--data", "data", "--out", "network", "--n-boot", "50"},
        {"report", "--results", "backtest/results.csv", "--out", "report"},
    };
    const fs::path root = testing::temp_dir("acceptance_determinism");
    const fs::path cwd = fs::current_path();
    std::vector<std::string> failures;
    for (const char* run : {"run1", "run2"}) {
        fs::create_directories(root / run);
        fs::current_path(root / run);
        for (const auto& args : pipeline) {
            std::ostringstream out, err;
            if (cli::run_command(args, out, err) != cli::kExitOk) {
                failures.push_back(std::string(run) + " " + args[0] + ": " + err.str());
            }
        }
    }
    fs::current_path(cwd);

    std::size_t manifests = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "run1")) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("manifest-", 0) != 0) continue;
        ++manifests;
        const fs::path twin = root / "run2" / fs::relative(entry.path(), root / "run1");
        if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) ++differing;
    }
    const bool pass = failures.empty() && manifests == pipeline.size() && differing == 0;
    std::string detail = std::to_string(manifests) + " manifests, " + std::to_string(differing) + " differ";
    for (const auto& f : failures) detail += "; " + f;
    return {pass, detail};
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

// Optional arguments restrict the run to the named criteria, e.g. `ovi_acceptance AC1 AC3`.
int main(int argc, char** argv) {
    const std::vector<std::string> only(argv + 1, argv + argc);
    const std::vector<Criterion> criteria{
        {"AC1", "gradient correctness", 10, gradient_correctness},
        {"AC2", "pricing", 30, pricing},
        {"AC3", "OVI properties", 10, ovi_properties},
        {"AC4", "planted-signal recovery", 120, planted_recovery},
        {"AC5", "null calibration", 300, null_calibration},
        {"AC6", "P&L regression recovery", 180, regression_recovery},
        {"AC7", "network FWER", 180, network_fwer},
        {"AC8", "flow conservation", 5, flow_conservation},
        {"AC9", "defaults audit", 60, defaults_audit},
        {"AC10", "determinism", 120, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s %s %s: %s (%.1f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
