#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace sociallearn {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) over contiguous blocks. Results must be written
// to slot i by the callee so that output never depends on scheduling. If any
// call throws, the exception from the lowest index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)),
                                              std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::size_t> error_at(w, std::numeric_limits<std::size_t>::max());
  std::vector<std::thread> pool;
  pool.reserve(w);
  const std::size_t block = (n + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = t * block;
      const std::size_t hi = std::min(n, lo + block);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
          error_at[t] = i;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  const auto first = std::min_element(error_at.begin(), error_at.end());
  if (*first != std::numeric_limits<std::size_t>::max()) {
    std::rethrow_exception(errors[static_cast<std::size_t>(first - error_at.begin())]);
  }
}

}  // namespace sociallearn
