#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace cryf {

/// Data-parallel width: CRYF_THREADS if set and positive, otherwise hardware concurrency.
unsigned thread_width();

/// Runs body(begin, end) over [0, n) in contiguous chunks. Only for pointwise kernels
/// with disjoint writes; reductions stay serial so results do not depend on the width.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  constexpr std::size_t kMinChunk = 8192;
  const unsigned width = thread_width();
  if (width <= 1 || n < 2 * kMinChunk) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(width, n / kMinChunk);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::jthread> workers;
  workers.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t lo = c * step;
    const std::size_t hi = std::min(n, lo + step);
    if (lo < hi) workers.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(std::size_t{0}, std::min(n, step));
}

}  // namespace cryf
