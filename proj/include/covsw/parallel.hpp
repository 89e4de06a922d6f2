#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace covsw {

/// Runs body(begin, end) over [0, n) split into `threads` contiguous chunks.
/// Chunk boundaries depend only on n and threads.
template <class Body>
void parallel_chunks(std::size_t n, int threads, Body&& body) {
  const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  if (t == 1 || n < 2 * t) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t - 1);
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t i = 1; i < t; ++i) {
    const std::size_t begin = std::min(n, i * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(std::size_t{0}, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

}  // namespace covsw
