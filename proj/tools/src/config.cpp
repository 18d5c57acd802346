#include "ovi_cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "ovi/error.hpp"

namespace ovi::cli {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const RunConfig& c) {
    ordered_json intraday = ordered_json::array();
    for (const auto& s : c.intraday) intraday.push_back({{"exchange", s.exchange}, {"path", s.path}});
    ordered_json rho = ordered_json::object();
    for (const auto& [k, v] : c.rho) rho[k] = v;
    const HyperParams& h = c.hyper;
    return ordered_json{
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"threads", c.threads},
        {"data_dir", c.data_dir},
        {"benchmark", c.benchmark},
        {"clamp_corrections", c.clamp_corrections},
        {"intraday", intraday},
        {"daily", c.daily},
        {"equity", c.equity},
        {"assets", c.assets},
        {"days", c.days},
        {"rho", rho},
        {"synth_mpcs", c.synth_mpcs},
        {"base_volume", c.base_volume},
        {"expiries", c.expiries},
        {"strikes", c.strikes},
        {"filters", c.filters},
        {"mpcs", c.mpcs},
        {"per_asset_quartiles", c.per_asset_quartiles},
        {"rate", c.rate},
        {"return_mode", c.return_mode},
        {"schemes", c.schemes},
        {"groups", c.groups},
        {"holding_days", c.holding_days},
        {"iv_cap", c.iv_cap},
        {"write_paths", c.write_paths},
        {"train_len", c.train_len},
        {"test_len", c.test_len},
        {"stride", c.stride},
        {"hyper",
         {{"alpha1", h.alpha1},
          {"alpha2", h.alpha2},
          {"lambda_grid", h.lambda_grid},
          {"validation_fraction", h.validation_fraction},
          {"learn_rate", h.learn_rate},
          {"moment1", h.moment1},
          {"moment2", h.moment2},
          {"epsilon", h.epsilon},
          {"max_iters", h.max_iters},
          {"tol", h.tol},
          {"init_scale", h.init_scale}}},
        {"partition_intent", c.partition_intent},
        {"network_mpc", c.network_mpc},
        {"network_group", c.network_group},
        {"level", c.level},
        {"n_boot", c.n_boot},
        {"results", c.results},
        {"format", c.format},
    };
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

void apply_json(const json& j, RunConfig& c) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    static const std::set<std::string> known = [] {
        std::set<std::string> keys;
        const ordered_json defaults = to_json(RunConfig{});
        for (const auto& [k, v] : defaults.items()) keys.insert(k);
        return keys;
    }();
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
    try {
        read(j, "seed", c.seed);
        read(j, "output_dir", c.output_dir);
        read(j, "threads", c.threads);
        read(j, "data_dir", c.data_dir);
        read(j, "benchmark", c.benchmark);
        read(j, "clamp_corrections", c.clamp_corrections);
        if (auto it = j.find("intraday"); it != j.end()) {
            c.intraday.clear();
            for (const auto& e : *it) {
                IntradaySource s;
                read(e, "exchange", s.exchange);
                read(e, "path", s.path);
                c.intraday.push_back(s);
            }
        }
        read(j, "daily", c.daily);
        read(j, "equity", c.equity);
        read(j, "assets", c.assets);
        read(j, "days", c.days);
        read(j, "rho", c.rho);
        read(j, "synth_mpcs", c.synth_mpcs);
        read(j, "base_volume", c.base_volume);
        read(j, "expiries", c.expiries);
        read(j, "strikes", c.strikes);
        read(j, "filters", c.filters);
        read(j, "mpcs", c.mpcs);
        read(j, "per_asset_quartiles", c.per_asset_quartiles);
        read(j, "rate", c.rate);
        read(j, "return_mode", c.return_mode);
        read(j, "schemes", c.schemes);
        read(j, "groups", c.groups);
        read(j, "holding_days", c.holding_days);
        read(j, "iv_cap", c.iv_cap);
        read(j, "write_paths", c.write_paths);
        read(j, "train_len", c.train_len);
        read(j, "test_len", c.test_len);
        read(j, "stride", c.stride);
        if (auto it = j.find("hyper"); it != j.end()) {
            HyperParams& h = c.hyper;
            read(*it, "alpha1", h.alpha1);
            read(*it, "alpha2", h.alpha2);
            read(*it, "lambda_grid", h.lambda_grid);
            read(*it, "validation_fraction", h.validation_fraction);
            read(*it, "learn_rate", h.learn_rate);
            read(*it, "moment1", h.moment1);
            read(*it, "moment2", h.moment2);
            read(*it, "epsilon", h.epsilon);
            read(*it, "max_iters", h.max_iters);
            read(*it, "tol", h.tol);
            read(*it, "init_scale", h.init_scale);
        }
        read(j, "partition_intent", c.partition_intent);
        read(j, "network_mpc", c.network_mpc);
        read(j, "network_group", c.network_group);
        read(j, "level", c.level);
        read(j, "n_boot", c.n_boot);
        read(j, "results", c.results);
        read(j, "format", c.format);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    apply_json(j, base);
    return base;
}

void apply_environment(RunConfig& cfg) {
    if (const char* dir = std::getenv("OVI_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
    if (const char* t = std::getenv("OVI_THREADS"); t && *t) {
        char* end = nullptr;
        const unsigned long n = std::strtoul(t, &end, 10);
        if (*end != '\0') throw ConfigError(std::string("OVI_THREADS is not a number: ") + t);
        cfg.threads = static_cast<unsigned>(n);
    }
}

SynthConfig synth_config(const RunConfig& c) {
    SynthConfig s;
    s.assets = c.assets;
    s.days = c.days;
    s.seed = c.seed;
    s.benchmark = c.benchmark;
    s.base_volume = c.base_volume;
    s.expiries = c.expiries;
    s.strikes = c.strikes;
    s.rate = c.rate;
    s.mpcs.clear();
    for (const auto& code : c.synth_mpcs) {
        auto m = mpc_from_name(code);
        if (!m) throw ConfigError("unknown MPC '" + code + "'");
        s.mpcs.push_back(*m);
    }
    for (const auto& [code, rho] : c.rho) {
        auto m = mpc_from_name(code);
        if (!m) throw ConfigError("unknown MPC '" + code + "' in rho");
        s.rho[index(*m)] = rho;
    }
    s.validate();
    return s;
}

}  // namespace ovi::cli
