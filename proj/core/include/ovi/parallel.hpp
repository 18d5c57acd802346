#pragma once

#include <cstddef>
#include <functional>

namespace ovi {

/// Caps worker threads used by library routines. 0 restores the hardware default.
void set_max_threads(unsigned n) noexcept;
[[nodiscard]] unsigned max_threads() noexcept;

/// Runs `body(begin, end)` over contiguous chunks of [0, n). Chunk boundaries depend only on
/// `n` and the thread cap, so callers that write disjoint outputs stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ovi
