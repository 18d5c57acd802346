#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ovi/bootstrap.hpp"
#include "ovi/csv.hpp"
#include "ovi/error.hpp"
#include "ovi/flow.hpp"
#include "ovi/network.hpp"
#include "ovi/parallel.hpp"
#include "ovi/portfolio.hpp"
#include "ovi/powerlaw.hpp"
#include "ovi/random.hpp"
#include "ovi/regression.hpp"
#include "ovi/returns.hpp"
#include "ovi/signals.hpp"
#include "ovi/stats.hpp"
#include "ovi/synthetic.hpp"
#include "ovi_cli/cli.hpp"
#include "ovi_cli/config.hpp"
#include "ovi_cli/manifest.hpp"
#include "ovi_cli/report.hpp"

namespace ovi::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir);
    return fs::path(dir);
}

std::vector<Mpc> parse_mpcs(const std::vector<std::string>& codes) {
    std::vector<Mpc> out;
    for (const auto& c : codes) {
        auto m = mpc_from_name(c);
        if (!m) throw ConfigError("unknown MPC '" + c + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw ConfigError("no MPC selected");
    return out;
}

std::vector<fs::path> dataset_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if ((name.starts_with("intraday_") && name.ends_with(".csv")) || name == "daily.csv" || name == "equity.csv") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

MarketDataset load_data(const RunConfig& cfg, Manifest& manifest) {
    DatasetOptions opts;
    opts.benchmark = cfg.benchmark;
    opts.clamp_corrections = cfg.clamp_corrections;
    auto data = load_dataset(cfg.data_dir, opts);
    for (const auto& f : dataset_files(cfg.data_dir)) manifest.add_input(f);
    return data;
}

ordered_json quality_json(const DataQualityReport& q) {
    return {{"clamped_volume_decrements", q.clamped_volume_decrements},
            {"clamped_trade_decrements", q.clamped_trade_decrements},
            {"clamped_keys", q.clamped_keys}};
}

void save_data(const MarketDataset& data, const fs::path& out, Manifest& manifest) {
    save_dataset(data, out);
    for (const auto& f : dataset_files(out)) manifest.add_output(f);
    const auto q = out / "data_quality.json";
    open_out(q) << quality_json(data.data_quality()).dump(2) << '\n';
    manifest.add_output(q);
    manifest.note("assets", data.asset_count());
    manifest.note("days", data.day_count());
    manifest.note("contracts", data.contract_count());
}

std::vector<OviPanel> compute_signals(const MarketDataset& data, const RunConfig& cfg) {
    FeatureOptions fo;
    fo.rate = cfg.rate;
    fo.per_asset = cfg.per_asset_quartiles;
    std::vector<OviPanel> panels;
    for (const auto& text : cfg.filters) panels.push_back(compute_ovi(data, FilterSpec::parse(text), fo));
    if (panels.empty()) throw ConfigError("no filter configured");
    return panels;
}

void note_warnings(Manifest& manifest, const std::vector<std::string>& warnings) {
    if (!warnings.empty()) manifest.note("warnings", warnings);
}

// ---- subcommands -------------------------------------------------------------------------

void cmd_synth(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const auto dir = prepare_dir(cfg.output_dir);
    const auto data = generate_synthetic_market(synth_config(cfg));
    save_data(data, dir, manifest);
    out << "synth: " << data.asset_count() << " assets, " << data.day_count() << " days -> " << dir.string()
        << '\n';
}

void cmd_ingest(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    if (cfg.intraday.empty() || cfg.daily.empty() || cfg.equity.empty()) {
        throw ConfigError("ingest needs --intraday, --daily and --equity");
    }
    DatasetOptions opts;
    opts.benchmark = cfg.benchmark;
    opts.clamp_corrections = cfg.clamp_corrections;
    DatasetBuilder builder(opts);
    const auto open_in = [&](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        if (!f) throw ConfigError("cannot read " + p);
        manifest.add_input(p);
        return f;
    };
    for (const auto& src : cfg.intraday) {
        auto f = open_in(src.path);
        IntradayCsvSchema schema{src.exchange, cfg.clamp_corrections};
        for (const auto& b : parse_intraday(f, schema)) builder.add_bucket(b);
    }
    {
        auto f = open_in(cfg.daily);
        for (const auto& s : parse_daily_summary(f)) builder.add_summary(s);
    }
    {
        auto f = open_in(cfg.equity);
        for (const auto& e : parse_equity_bars(f)) builder.add_equity(e);
    }
    const auto data = std::move(builder).build();
    const auto dir = prepare_dir(cfg.output_dir);
    save_data(data, dir, manifest);
    out << "ingest: " << data.asset_count() << " assets, " << data.day_count() << " days\n";
}

void cmd_ovi(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const auto data = load_data(cfg, manifest);
    const auto mpcs = parse_mpcs(cfg.mpcs);
    const auto dir = prepare_dir(cfg.output_dir);
    const auto path = dir / "ovi.csv";
    auto f = open_out(path);
    bool header = true;
    std::vector<std::string> warnings;
    for (const auto& panel : compute_signals(data, cfg)) {
        std::ostringstream buf;
        write_ovi_csv(buf, panel, mpcs);
        std::string text = buf.str();
        if (!header) text.erase(0, text.find('\n') + 1);
        f << text;
        header = false;
        warnings.insert(warnings.end(), panel.warnings.begin(), panel.warnings.end());
    }
    f.close();
    manifest.add_output(path);
    note_warnings(manifest, warnings);
    out << "ovi: wrote " << path.string() << '\n';
}

std::string path_name(std::size_t filter, const std::string& mpc, int group, const std::string& scheme,
                      const std::string& mode) {
    return "pnl_f" + std::to_string(filter) + "_" + mpc + "_Q" + std::to_string(group) + "_" + scheme + "_" + mode +
           ".csv";
}

void cmd_backtest(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const auto data = load_data(cfg, manifest);
    const auto mpcs = parse_mpcs(cfg.mpcs);
    const auto mode = ReturnMode::parse(cfg.return_mode);
    if (cfg.holding_days < 1) throw ConfigError("holding_days must be at least 1");
    std::vector<BetKind> schemes;
    for (const auto& s : cfg.schemes) {
        auto k = bet_kind_from_code(s);
        if (!k) throw ConfigError("unknown scheme '" + s + "'");
        schemes.push_back(*k);
    }
    for (int g : cfg.groups) {
        if (g < 1 || g > 5) throw ConfigError("group must be in 1..5");
    }
    const bool needs_liquidity = std::any_of(schemes.begin(), schemes.end(), [](BetKind k) {
        return k != BetKind::Uniform && k != BetKind::Imbalance;
    });
    const std::string mode_id =
        cfg.holding_days > 1 ? mode.id() + "_H" + std::to_string(cfg.holding_days) : mode.id();

    const auto returns = compute_returns(data, mode);
    const auto signals = compute_signals(data, cfg);
    const auto dir = prepare_dir(cfg.output_dir);
    if (cfg.write_paths) fs::create_directories(dir / "paths");

    std::map<Mpc, LiquidityPanel> liquidity;
    LiquidityOptions lo;
    lo.rate = cfg.rate;
    lo.iv_cap = cfg.iv_cap;
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings;
    for (std::size_t f = 0; f < signals.size(); ++f) {
        for (Mpc m : mpcs) {
            const Panel s = signals[f].mpc_panel(m);
            const LiquidityPanel* liq = nullptr;
            if (needs_liquidity) {
                auto it = liquidity.find(m);
                if (it == liquidity.end()) it = liquidity.emplace(m, compute_liquidity(data, m, lo)).first;
                liq = &it->second;
            }
            for (int g : cfg.groups) {
                for (BetKind k : schemes) {
                    const StrategySpec spec{k, g};
                    const PnlSeries p = cfg.holding_days > 1
                                            ? holding_period_pnl(s, data, spec, cfg.holding_days, mode.basis, liq)
                                            : pnl_series(s, returns, spec, liq);
                    ResultRow r;
                    r.signal = signals[f].filter.id();
                    r.mpc = std::string(to_code(m));
                    r.group = g;
                    r.scheme = std::string(to_code(k));
                    r.mode = mode_id;
                    try {
                        const auto perf = performance_summary(p);
                        const auto test = sr_significance_test(p);
                        r.sr = perf.sharpe;
                        r.ppd = perf.ppd;
                        r.p_value = test.p_value;
                        r.profitable_ratio = perf.profitable_ratio;
                        r.n_avg = perf.n_avg;
                        r.trading_days = perf.trading_days;
                    } catch (const UndefinedStatisticError& e) {
                        r.sr = r.ppd = r.p_value = r.profitable_ratio = r.n_avg = std::nan("");
                        warnings.push_back(r.mpc + " Q" + std::to_string(g) + " " + r.scheme + ": " + e.what());
                    }
                    for (const auto& w : p.warnings) warnings.push_back(w);
                    if (cfg.write_paths) {
                        const auto path = dir / "paths" / path_name(f, r.mpc, g, r.scheme, mode_id);
                        auto po = open_out(path);
                        write_cumulative_pnl(po, p);
                        po.close();
                        manifest.add_output(path);
                    }
                    rows.push_back(std::move(r));
                }
            }
        }
    }
    const auto path = dir / "results.csv";
    auto ro = open_out(path);
    write_results_csv(ro, rows);
    ro.close();
    manifest.add_output(path);
    note_warnings(manifest, warnings);
    out << "backtest: " << rows.size() << " strategies -> " << path.string() << '\n';
}

void cmd_regress(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const auto data = load_data(cfg, manifest);
    const auto mpcs = parse_mpcs(cfg.mpcs);
    const auto returns = compute_returns(data, ReturnMode::parse(cfg.return_mode));
    const auto signals = compute_signals(data, cfg);
    std::vector<Panel> panels;
    std::vector<std::string> ids;
    for (std::size_t f = 0; f < signals.size(); ++f) {
        for (Mpc m : mpcs) {
            panels.push_back(signals[f].mpc_panel(m));
            ids.push_back(std::string(to_code(m)) + (signals.size() > 1 ? "#" + std::to_string(f) : ""));
        }
    }
    const auto tensor = stack_features(panels, ids);
    HyperParams hp = cfg.hyper;
    hp.seed = derive_seed(cfg.seed, "optimizer");
    const WindowSpec window{cfg.train_len, cfg.test_len, cfg.stride};
    const auto results = sliding_window_backtest(tensor, returns.values, window, hp);

    const auto dir = prepare_dir(cfg.output_dir);
    const auto coef_path = dir / "coefficients.csv";
    const auto win_path = dir / "windows.csv";
    {
        auto c = open_out(coef_path);
        auto w = open_out(win_path);
        c << "window_end_date,feature_id,beta\n";
        w << "window_end_date,in_ppd,out_ppd\n";
        for (const auto& r : results) {
            const auto date = r.end_date.iso();
            for (std::size_t k = 0; k < r.beta.size(); ++k) {
                c << date << ',' << (k == 0 ? std::string("intercept") : tensor.feature_ids[k - 1]) << ','
                  << format_double(r.beta[k]) << '\n';
            }
            w << date << ',' << format_double(r.in_ppd) << ',' << format_double(r.out_ppd) << '\n';
        }
    }
    manifest.add_output(coef_path);
    manifest.add_output(win_path);
    manifest.note("windows", results.size());
    out << "regress: " << results.size() << " windows\n";
}

void cmd_flow(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const auto data = load_data(cfg, manifest);
    FlowOptions fo;
    fo.partition_intent = cfg.partition_intent;
    const auto share = median_flow_share(data, fo);
    const auto dir = prepare_dir(cfg.output_dir);
    const auto path = dir / "flow.csv";
    {
        auto f = open_out(path);
        write_flow_csv(f, share.median);
    }
    double max_mismatch = 0.0, sum_mismatch = 0.0;
    for (double m : share.daily_mismatch) {
        max_mismatch = std::max(max_mismatch, m);
        sum_mismatch += m;
    }
    const auto summary = dir / "flow_summary.json";
    open_out(summary) << ordered_json{{"days_used", share.days_used},
                                      {"windows_without_sellers", share.windows_without_sellers},
                                      {"mean_daily_mismatch", share.daily_mismatch.empty()
                                                                  ? 0.0
                                                                  : sum_mismatch / static_cast<double>(
                                                                                       share.daily_mismatch.size())},
                                      {"max_daily_mismatch", max_mismatch}}
                                .dump(2)
                      << '\n';
    manifest.add_output(path);
    manifest.add_output(summary);
    out << "flow: " << share.days_used << " days -> " << path.string() << '\n';
}

ordered_json powerlaw_json(const std::vector<std::size_t>& degrees, const RunConfig& cfg, std::uint64_t seed) {
    std::vector<std::int64_t> d(degrees.begin(), degrees.end());
    try {
        const auto t = powerlaw_degree_test(d, cfg.n_boot, seed);
        return {{"alpha", t.fit.alpha},
                {"xmin", t.fit.xmin},
                {"ks", t.fit.ks},
                {"n_tail", t.fit.n_tail},
                {"p_value", t.p_value},
                {"n_boot", t.n_boot},
                {"warnings", t.warnings}};
    } catch (const DegenerateFitError& e) {
        return {{"error", e.what()}};
    }
}

void cmd_network(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const auto data = load_data(cfg, manifest);
    auto mpc = mpc_from_name(cfg.network_mpc);
    if (!mpc) throw ConfigError("unknown MPC '" + cfg.network_mpc + "'");
    auto level = significance_level_from_code(cfg.level);
    if (!level) throw ConfigError("unknown significance level '" + cfg.level + "'");
    const auto returns = compute_returns(data, ReturnMode::parse(cfg.return_mode));
    FeatureOptions fo;
    fo.rate = cfg.rate;
    fo.per_asset = cfg.per_asset_quartiles;
    const auto signal = compute_ovi(data, FilterSpec::parse(cfg.filters.at(0)), fo).mpc_panel(*mpc);

    NetworkOptions no;
    no.group = cfg.network_group;
    const auto tests = edge_tests(signal, returns, no);
    const auto net = threshold_network(tests, *level);
    const auto stats = motif_stats(net);
    const auto binom = binomial_degree_tests(net);
    const std::uint64_t boot = derive_seed(cfg.seed, "bootstrap");

    const auto dir = prepare_dir(cfg.output_dir);
    const auto edges_path = dir / "edges.csv";
    {
        auto f = open_out(edges_path);
        write_edge_list_csv(f, net);
    }
    ordered_json by_level = ordered_json::object();
    for (auto l : {SignificanceLevel::Uncorrected, SignificanceLevel::RowBonferroni, SignificanceLevel::FullBonferroni}) {
        by_level[std::string(to_code(l))] = threshold_network(tests, l).edge_count();
    }
    const auto dir_json = [](const BinomialDirection& b) {
        return ordered_json{{"tested", b.tested},
                            {"rejected", b.rejected},
                            {"skipped", b.skipped},
                            {"fraction_rejected", b.fraction_rejected}};
    };
    const ordered_json summary{
        {"mpc", std::string(to_code(*mpc))},
        {"group", no.group},
        {"level", std::string(to_code(*level))},
        {"return_mode", returns.mode.id()},
        {"assets", net.size()},
        {"edges", stats.edges},
        {"density", stats.density},
        {"self_loops", stats.self_loops},
        {"bidirected", stats.bidirected},
        {"er_expected", {{"self_loops", stats.expected.self_loops}, {"bidirected", stats.expected.bidirected}}},
        {"zero_variance_edges", net.zero_variance_edges},
        {"edges_by_level", by_level},
        {"powerlaw",
         {{"in_degree", powerlaw_json(stats.in_degree, cfg, derive_seed(boot, "in"))},
          {"out_degree", powerlaw_json(stats.out_degree, cfg, derive_seed(boot, "out"))}}},
        {"binomial", {{"in_degree", dir_json(binom.in)}, {"out_degree", dir_json(binom.out)}}},
    };
    const auto summary_path = dir / "network_summary.json";
    open_out(summary_path) << summary.dump(2) << '\n';
    manifest.add_output(edges_path);
    manifest.add_output(summary_path);
    out << "network: " << stats.edges << " edges over " << net.size() << " assets\n";
}

void cmd_report(const RunConfig& cfg, Manifest& manifest, std::ostream& out) {
    const std::string results = cfg.results.empty() ? (fs::path(cfg.output_dir) / "results.csv").string() : cfg.results;
    std::ifstream in(results, std::ios::binary);
    if (!in) throw ConfigError("cannot read results file " + results);
    manifest.add_input(results);
    ReportFormat format;
    if (cfg.format == "csv") {
        format = ReportFormat::Csv;
    } else if (cfg.format == "json") {
        format = ReportFormat::Json;
    } else {
        throw ConfigError("format must be csv or json");
    }
    const auto rows = read_results_csv(in);
    const auto dir = prepare_dir(cfg.output_dir);
    for (const auto& p : emit_report(rows, format, dir)) manifest.add_output(p);
    out << "report: " << rows.size() << " results\n";
}

// ---- argument plumbing -------------------------------------------------------------------

/// Finds --config before full parsing so flags can override the file.
std::string find_config_flag(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

IntradaySource parse_intraday_flag(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) return IntradaySource{"PHLX", text};
    return IntradaySource{text.substr(0, eq), text.substr(eq + 1)};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path;
    try {
        config_path = find_config_flag(args);
        if (!config_path.empty()) cfg = load_config_file(config_path);
        apply_environment(cfg);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }

    CLI::App app{"Option volume imbalance toolkit", "ovi"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_option("--out", cfg.output_dir, "Output directory (env OVI_OUTPUT_DIR)");
    app.add_option("--threads", cfg.threads, "Worker thread cap, 0 for all cores (env OVI_THREADS)");
    app.add_option("--seed", cfg.seed, "Root seed of every random stream");

    std::vector<std::string> rho_flags, intraday_flags;
    const auto add_data = [&](CLI::App* sub) {
        sub->add_option("--data", cfg.data_dir, "Dataset directory");
        sub->add_option("--benchmark", cfg.benchmark, "Benchmark asset id");
        sub->add_flag("--clamp-corrections", cfg.clamp_corrections, "Clamp cumulative decreases");
    };
    const auto add_signal = [&](CLI::App* sub) {
        sub->add_option("--filter", cfg.filters, "OVI filter spec, e.g. kind=volume;iv_bucket=4 (repeatable)");
        sub->add_option("--mpc", cfg.mpcs, "MPC codes (FIRM BROKER MM CUST PROCUST)");
        sub->add_flag("--per-asset-quartiles", cfg.per_asset_quartiles, "Feature quartiles per underlying");
        sub->add_option("--rate", cfg.rate, "Risk-free rate for Black-Scholes features");
    };

    auto* synth = app.add_subcommand("synth", "Generate a synthetic market with planted signals");
    synth->add_option("--assets", cfg.assets);
    synth->add_option("--days", cfg.days);
    synth->add_option("--rho", rho_flags, "Planted correlation, MPC=value (repeatable)");
    synth->add_option("--synth-mpcs", cfg.synth_mpcs, "MPCs present in the synthetic flow");
    synth->add_option("--base-volume", cfg.base_volume);
    synth->add_option("--expiries", cfg.expiries);
    synth->add_option("--strikes", cfg.strikes);
    synth->add_option("--benchmark", cfg.benchmark);

    auto* ingest = app.add_subcommand("ingest", "Validate raw CSV files into a dataset directory");
    ingest->add_option("--intraday", intraday_flags, "Intraday CSV, [EXCHANGE=]path (repeatable)");
    ingest->add_option("--daily", cfg.daily, "Daily option summary CSV");
    ingest->add_option("--equity", cfg.equity, "Equity bar CSV");
    ingest->add_option("--benchmark", cfg.benchmark);
    ingest->add_flag("--clamp-corrections", cfg.clamp_corrections);

    auto* ovi = app.add_subcommand("ovi", "Compute imbalance panels");
    add_data(ovi);
    add_signal(ovi);

    auto* backtest = app.add_subcommand("backtest", "Backtest sign-following quantile strategies");
    add_data(backtest);
    add_signal(backtest);
    backtest->add_option("--return-mode", cfg.return_mode, "e.g. EMR_CL_tmOP, CL_tmCL");
    backtest->add_option("--scheme", cfg.schemes, "Bet schemes (uniform imbalance volume ...)");
    backtest->add_option("--group", cfg.groups, "Quantile groups 1..5");
    backtest->add_option("--holding", cfg.holding_days, "Holding period in days");
    backtest->add_option("--iv-cap", cfg.iv_cap);
    backtest->add_option("--write-paths", cfg.write_paths, "Write cumulative P&L paths (true/false)");

    auto* regress = app.add_subcommand("regress", "Sliding-window P&L regression");
    add_data(regress);
    add_signal(regress);
    regress->add_option("--return-mode", cfg.return_mode);
    regress->add_option("--train-len", cfg.train_len);
    regress->add_option("--test-len", cfg.test_len);
    regress->add_option("--stride", cfg.stride);
    regress->add_option("--alpha1", cfg.hyper.alpha1);
    regress->add_option("--learn-rate", cfg.hyper.learn_rate);
    regress->add_option("--max-iters", cfg.hyper.max_iters);
    regress->add_option("--lambda-grid", cfg.hyper.lambda_grid);

    auto* flow = app.add_subcommand("flow", "Median inter-participant flow shares");
    add_data(flow);
    flow->add_flag("--partition-intent", cfg.partition_intent, "Match within open/close classes");

    auto* network = app.add_subcommand("network", "Cross-impact network");
    add_data(network);
    add_signal(network);
    network->add_option("--return-mode", cfg.return_mode);
    network->add_option("--network-mpc", cfg.network_mpc, "Source-signal MPC");
    network->add_option("--network-group", cfg.network_group);
    network->add_option("--level", cfg.level, "uncorrected, row_bonferroni or full_bonferroni");
    network->add_option("--n-boot", cfg.n_boot, "Power-law bootstrap replicates");

    auto* report = app.add_subcommand("report", "Pivot backtest results into grids");
    report->add_option("--results", cfg.results, "results.csv (default <out>/results.csv)");
    report->add_option("--format", cfg.format, "csv or json");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    using Handler = std::function<void(const RunConfig&, Manifest&, std::ostream&)>;
    static const std::map<std::string, Handler> handlers{
        {"synth", cmd_synth},   {"ingest", cmd_ingest}, {"ovi", cmd_ovi},         {"backtest", cmd_backtest},
        {"regress", cmd_regress}, {"flow", cmd_flow},   {"network", cmd_network}, {"report", cmd_report},
    };
    try {
        if (!rho_flags.empty()) {
            cfg.rho.clear();
            for (const auto& r : rho_flags) {
                const auto eq = r.find('=');
                if (eq == std::string::npos) throw ConfigError("--rho expects MPC=value, got '" + r + "'");
                try {
                    cfg.rho[r.substr(0, eq)] = std::stod(r.substr(eq + 1));
                } catch (const std::logic_error&) {
                    throw ConfigError("--rho expects MPC=value, got '" + r + "'");
                }
            }
        }
        if (!intraday_flags.empty()) {
            cfg.intraday.clear();
            for (const auto& s : intraday_flags) cfg.intraday.push_back(parse_intraday_flag(s));
        }
        cfg.hyper.validate();
        set_max_threads(cfg.threads);
        Manifest manifest(command, to_json(cfg), cfg.seed);
        handlers.at(command)(cfg, manifest, out);
        manifest.write(cfg.output_dir);
    } catch (const Error& e) {
        err << "error: " << command << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << command << ": " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace ovi::cli
