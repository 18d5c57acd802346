#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "ovi/regression.hpp"
#include "ovi/synthetic.hpp"

namespace ovi::cli {

struct IntradaySource {
    std::string exchange = "PHLX";
    std::string path;
};

/// Everything a subcommand needs. Precedence, lowest first: built-in defaults, the JSON config
/// file, environment variables (OVI_OUTPUT_DIR, OVI_THREADS), command-line flags.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "ovi-out";
    unsigned threads = 0;

    // dataset
    std::string data_dir = "data";
    std::string benchmark = "SPY";
    bool clamp_corrections = false;

    // ingest
    std::vector<IntradaySource> intraday;
    std::string daily;
    std::string equity;

    // synth
    std::size_t assets = 50;
    std::size_t days = 600;
    std::map<std::string, double> rho;  ///< MPC code -> planted correlation
    std::vector<std::string> synth_mpcs{"FIRM", "BROKER", "MM", "CUST", "PROCUST"};
    double base_volume = 200.0;
    int expiries = 2;
    int strikes = 2;

    // signals
    std::vector<std::string> filters{"kind=volume"};
    std::vector<std::string> mpcs{"FIRM", "BROKER", "MM", "CUST", "PROCUST"};
    bool per_asset_quartiles = false;
    double rate = 0.0;

    // evaluation
    std::string return_mode = "EMR_CL_tmOP";
    std::vector<std::string> schemes{"uniform"};
    std::vector<int> groups{1, 2, 3, 4, 5};
    int holding_days = 1;
    double iv_cap = 2.0;
    bool write_paths = true;

    // regression
    std::size_t train_len = 500;
    std::size_t test_len = 100;
    std::size_t stride = 0;
    HyperParams hyper;

    // flow
    bool partition_intent = false;

    // network
    std::string network_mpc = "MM";
    int network_group = 3;
    std::string level = "full_bonferroni";
    std::size_t n_boot = 1000;

    // report
    std::string results;
    std::string format = "csv";
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Overlays the keys present in `j` onto `cfg`. Unknown keys throw ConfigError.
void apply_json(const nlohmann::json& j, RunConfig& cfg);
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Applies OVI_OUTPUT_DIR and OVI_THREADS when set.
void apply_environment(RunConfig& cfg);

/// Synthetic-market parameters described by the config.
SynthConfig synth_config(const RunConfig& cfg);

}  // namespace ovi::cli
