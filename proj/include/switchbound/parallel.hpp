#pragma once

#include <cstddef>
#include <functional>

namespace switchbound {

/// Worker count: hardware concurrency, capped by SWITCHBOUND_THREADS when set.
[[nodiscard]] std::size_t worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to worker_count()
/// threads. Chunking is static so results written by index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace switchbound
