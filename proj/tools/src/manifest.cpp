#include "ovi_cli/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

#include "ovi/error.hpp"
#include "ovi/random.hpp"

namespace ovi::cli {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
    }
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0; i < len; ++i) {
            out += kDigits[md[i] >> 4];
            out += kDigits[md[i] & 15];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string generic(const std::filesystem::path& p) { return p.lexically_normal().generic_string(); }

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

Manifest::Manifest(std::string command, nlohmann::ordered_json config, std::uint64_t seed)
    : command_(std::move(command)), config_(std::move(config)), seed_(seed) {}

void Manifest::add_input(const std::filesystem::path& path) { inputs_.push_back(path); }
void Manifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }
void Manifest::note(const std::string& key, nlohmann::ordered_json value) { notes_[key] = std::move(value); }

std::filesystem::path Manifest::write(const std::filesystem::path& dir) const {
    // Runtime placement does not change results, so it stays out of the hash.
    nlohmann::ordered_json hashed = config_;
    hashed.erase("output_dir");
    hashed.erase("threads");

    const auto files = [&](std::vector<std::filesystem::path> paths, bool relative) {
        std::sort(paths.begin(), paths.end());
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& p : paths) {
            const auto shown = relative ? std::filesystem::relative(p, dir) : p;
            arr.push_back({{"path", generic(shown)},
                           {"bytes", std::filesystem::file_size(p)},
                           {"sha256", file_sha256(p)}});
        }
        return arr;
    };

    nlohmann::ordered_json m;
    m["command"] = command_;
    m["seed"] = seed_;
    m["seeds"] = {{"synth", seed_},
                  {"bootstrap", derive_seed(seed_, "bootstrap")},
                  {"optimizer", derive_seed(seed_, "optimizer")}};
    m["config_hash"] = sha256_hex(hashed.dump());
    m["config"] = hashed;
    m["inputs"] = files(inputs_, false);
    m["outputs"] = files(outputs_, true);
    m["notes"] = notes_;

    const auto path = dir / ("manifest-" + command_ + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << m.dump(2) << '\n';
    return path;
}

}  // namespace ovi::cli
