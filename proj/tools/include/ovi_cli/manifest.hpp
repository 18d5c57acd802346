#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ovi::cli {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Records what a run consumed and produced. Paths are stored relative to the output
/// directory and no timestamps are written, so identical runs give identical manifests.
class Manifest {
public:
    Manifest(std::string command, nlohmann::ordered_json config, std::uint64_t seed);

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void note(const std::string& key, nlohmann::ordered_json value);

    /// Writes manifest-<command>.json into `dir` and returns its path.
    std::filesystem::path write(const std::filesystem::path& dir) const;

private:
    std::string command_;
    nlohmann::ordered_json config_;
    std::uint64_t seed_;
    std::vector<std::filesystem::path> inputs_;
    std::vector<std::filesystem::path> outputs_;
    nlohmann::ordered_json notes_ = nlohmann::ordered_json::object();
};

}  // namespace ovi::cli
