#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ovi {

using Rng = std::mt19937_64;

/// Seed of a named sub-stream ("synth", "bootstrap", "optimizer") of a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) noexcept;
/// Seed of the `index`-th child stream, e.g. one per bootstrap resample.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept;

}  // namespace ovi
