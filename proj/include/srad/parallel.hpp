#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "srad/common.hpp"

namespace srad {

/// Worker count for a request of `threads` (0 = hardware concurrency).
inline unsigned worker_count(unsigned threads, Index items) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned n = threads == 0 ? hw : threads;
  return static_cast<unsigned>(std::clamp<Index>(items, 1, n));
}

/// Calls body(i) for i in [0, n). Each index runs exactly once; results must
/// be written to per-index slots. If several items throw, the exception of
/// the lowest index is rethrown so failures are reproducible.
template <class Body>
void parallel_for(Index n, unsigned threads, Body&& body) {
  if (n <= 0) return;
  const unsigned workers = worker_count(threads, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto run = [&](Index i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (workers == 1) {
    for (Index i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (Index i = next++; i < n; i = next++) run(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace srad
