#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "ovi/csv.hpp"
#include "ovi/error.hpp"
#include "ovi/signals.hpp"
#include "ovi_cli/cli.hpp"
#include "ovi_cli/config.hpp"
#include "ovi_cli/report.hpp"

using namespace ovi;
using namespace ovi::cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const fs::path kGolden = fs::path(OVI_GOLDEN_DIR) / "report";

/// Restores the working directory and environment on scope exit.
class Sandbox {
public:
    Sandbox() : cwd_(fs::current_path()) {
        unsetenv("OVI_OUTPUT_DIR");
        unsetenv("OVI_THREADS");
    }
    ~Sandbox() {
        fs::current_path(cwd_);
        unsetenv("OVI_OUTPUT_DIR");
        unsetenv("OVI_THREADS");
    }

private:
    fs::path cwd_;
};

}  // namespace

TEST(Cli, ExitCodes) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_exit");
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"report", "--no-such-flag"}).code, kExitUsage);
    const CliRun missing = run({"backtest", "--data", (dir / "nothing").string(), "--out", (dir / "o").string()});
    EXPECT_EQ(missing.code, kExitFailure);
    EXPECT_NE(missing.err.find("error: backtest"), std::string::npos);
    EXPECT_EQ(run({"backtest", "--return-mode", "sideways", "--out", (dir / "o").string()}).code, kExitFailure);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, UnwritableOutputDirectoryFails) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_unwritable");
    write_file(dir / "blocker", "x");
    write_file(dir / "results.csv", std::string(kResultsHeader) + "\n");
    const CliRun r = run({"report", "--results", (dir / "results.csv").string(), "--out", (dir / "blocker" / "sub").string()});
    EXPECT_EQ(r.code, kExitFailure);
}

TEST(Cli, EmptyResultsGiveHeaderOnlyGrids) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_empty_report");
    write_file(dir / "results.csv", std::string(kResultsHeader) + "\n");
    const CliRun r = run({"report", "--results", (dir / "results.csv").string(), "--out", (dir / "rep").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* m : {"sr", "ppd", "p_value", "profitable_ratio", "n_avg"}) {
        EXPECT_EQ(slurp(dir / "rep" / (std::string("grid_") + m + ".csv")), "signal,scheme,mode,mpc,Q1,Q2,Q3,Q4,Q5\n");
    }
    EXPECT_TRUE(fs::exists(dir / "rep" / "manifest-report.json"));
}

TEST(Cli, ReportMatchesGoldenFiles) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_golden");
    const CliRun r = run({"report", "--results", (kGolden / "results.csv").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* m : {"sr", "ppd", "p_value", "profitable_ratio", "n_avg"}) {
        const std::string name = std::string("grid_") + m + ".csv";
        EXPECT_EQ(slurp(dir / name), slurp(kGolden / name)) << name;
    }
    const CliRun j = run({"report", "--results", (kGolden / "results.csv").string(), "--out", (dir / "json").string(),
                       "--format", "json"});
    ASSERT_EQ(j.code, kExitOk) << j.err;
    const auto doc = nlohmann::json::parse(slurp(dir / "json" / "report.json"));
    EXPECT_EQ(doc["sr"][0]["Q3"].get<double>(), 4.25);
    EXPECT_TRUE(doc["sr"][0]["Q2"].is_null());
}

TEST(Cli, OneResultRowHasAllColumns) {
    ResultRow row{"kind=volume", "MM", 3, "uniform", "EMR_CL_tmOP", 1.5, 0.002, 0.01, 0.53, 40.0, 250};
    std::ostringstream os;
    write_results_csv(os, {row});
    std::istringstream is(os.str());
    std::string header, line, extra;
    std::getline(is, header);
    std::getline(is, line);
    EXPECT_FALSE(std::getline(is, extra));
    const auto fields = split_csv_line(line);
    ASSERT_EQ(fields.size(), 11u);
    for (auto f : fields) EXPECT_FALSE(f.empty());
    std::istringstream back(os.str());
    const auto rows = read_results_csv(back);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].sr, 1.5);
    EXPECT_EQ(rows[0].trading_days, 250u);
}

TEST(Config, JsonRoundTrip) {
    RunConfig cfg;
    cfg.seed = 99;
    cfg.filters = {"kind=nominal;side=buy", "iv_bucket=4"};
    cfg.rho = {{"MM", -0.3}, {"FIRM", 0.1}};
    cfg.intraday = {{"ISE", "a.csv"}, {"PHLX", "b.csv"}};
    cfg.hyper.alpha1 = 7.5;
    cfg.hyper.lambda_grid = {0.0, 0.5};
    cfg.groups = {3};
    cfg.level = "row_bonferroni";
    RunConfig back;
    apply_json(nlohmann::json::parse(to_json(cfg).dump()), back);
    EXPECT_EQ(to_json(back).dump(), to_json(cfg).dump());
    EXPECT_EQ(back.hyper.alpha1, 7.5);
    EXPECT_EQ(back.intraday[0].exchange, "ISE");

    RunConfig untouched;
    EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"sed": 3})"), untouched), ConfigError);
}

TEST(Config, DefaultsMatchDocumentation) {
    const RunConfig cfg;
    EXPECT_EQ(cfg.train_len, 500u);
    EXPECT_EQ(cfg.test_len, 100u);
    EXPECT_EQ(cfg.iv_cap, 2.0);
    EXPECT_EQ(cfg.hyper.moment1, 0.9);
    EXPECT_EQ(cfg.hyper.moment2, 0.999);
    EXPECT_EQ(cfg.return_mode, "EMR_CL_tmOP");
    EXPECT_EQ(cfg.level, "full_bonferroni");
    EXPECT_EQ(cfg.n_boot, 1000u);
}

TEST(Config, PrecedenceIsDefaultsFileEnvFlags) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_precedence");
    fs::current_path(dir);
    write_file("results.csv", std::string(kResultsHeader) + "\n");
    write_file("cfg.json", R"({"output_dir": "from_file", "seed": 5, "results": "results.csv"})");

    ASSERT_EQ(run({"report", "--config", "cfg.json"}).code, kExitOk);
    EXPECT_TRUE(fs::exists("from_file/manifest-report.json"));
    const auto m = nlohmann::json::parse(slurp("from_file/manifest-report.json"));
    EXPECT_EQ(m["seed"].get<int>(), 5);

    setenv("OVI_OUTPUT_DIR", "from_env", 1);
    ASSERT_EQ(run({"report", "--config", "cfg.json"}).code, kExitOk);
    EXPECT_TRUE(fs::exists("from_env/manifest-report.json"));

    ASSERT_EQ(run({"report", "--config", "cfg.json", "--out", "from_flag", "--seed", "8"}).code, kExitOk);
    EXPECT_TRUE(fs::exists("from_flag/manifest-report.json"));
    EXPECT_EQ(nlohmann::json::parse(slurp("from_flag/manifest-report.json"))["seed"].get<int>(), 8);

    setenv("OVI_THREADS", "lots", 1);
    EXPECT_EQ(run({"report", "--config", "cfg.json"}).code, kExitFailure);
    unsetenv("OVI_THREADS");

    write_file("bad.json", R"({"no_such_key": 1})");
    EXPECT_EQ(run({"report", "--config", "bad.json"}).code, kExitFailure);
}

TEST(Cli, SynthIsDeterministic) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_synth_det");
    fs::current_path(dir);
    const std::vector<std::string> args{"synth", "--assets", "6", "--days", "25", "--seed", "7", "--out", "d"};
    ASSERT_EQ(run(args).code, kExitOk);
    const std::string first = slurp("d/manifest-synth.json");
    fs::rename("d", "d_first");
    ASSERT_EQ(run(args).code, kExitOk);
    EXPECT_EQ(slurp("d/manifest-synth.json"), first);
    for (const char* f : {"daily.csv", "equity.csv", "intraday_PHLX.csv"}) {
        EXPECT_EQ(slurp(fs::path("d") / f), slurp(fs::path("d_first") / f)) << f;
    }
    const auto m = nlohmann::json::parse(first);
    EXPECT_EQ(m["command"], "synth");
    EXPECT_EQ(m["config_hash"].get<std::string>().size(), 64u);
    EXPECT_FALSE(m["outputs"].empty());
}

TEST(Cli, OviMatchesLibrary) {
    Sandbox sb;
    const auto dir = ovi::testing::temp_dir("cli_ovi_equiv");
    ASSERT_EQ(run({"synth", "--assets", "8", "--days", "30", "--seed", "3", "--out", (dir / "data").string()}).code,
              kExitOk);
    const CliRun r = run({"ovi", "--data", (dir / "data").string(), "--out", (dir / "sig").string(), "--filter",
                       "iv_bucket=4", "--mpc", "MM", "--mpc", "CUST"});
    ASSERT_EQ(r.code, kExitOk) << r.err;

    const MarketDataset data = load_dataset(dir / "data");
    const OviPanel panel = compute_ovi(data, FilterSpec::parse("iv_bucket=4"));

    std::ifstream in(dir / "sig" / "ovi.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "date,asset,mpc,ovi,total_flow,filter_id");
    std::size_t rows = 0, nonzero = 0;
    while (std::getline(in, line)) {
        const auto f = split_csv_line(line);
        ASSERT_EQ(f.size(), 6u);
        const auto mpc = mpc_from_name(std::string(f[2]));
        ASSERT_TRUE(mpc.has_value());
        const auto a = std::find(panel.assets.begin(), panel.assets.end(), std::string(f[1])) - panel.assets.begin();
        const auto d = std::find_if(panel.days.begin(), panel.days.end(),
                                    [&](Date x) { return x.iso() == f[0]; }) - panel.days.begin();
        ASSERT_LT(static_cast<std::size_t>(a), panel.assets.size());
        ASSERT_LT(static_cast<std::size_t>(d), panel.days.size());
        const double expected = panel.value(*mpc, static_cast<std::size_t>(a), static_cast<std::size_t>(d));
        const double got = std::stod(std::string(f[3]));
        if (std::isnan(expected)) {
            EXPECT_TRUE(std::isnan(got));
        } else {
            EXPECT_EQ(got, expected) << line;
            if (expected != 0.0) ++nonzero;
        }
        ++rows;
    }
    EXPECT_EQ(rows, panel.days.size() * panel.assets.size() * 2);
    EXPECT_GT(nonzero, 0u);
}
