#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace warpcone {

// Splits [0, n) into `workers` contiguous slices and runs fn(begin, end, slice) on each, one thread
// per slice. Slice boundaries depend only on n and workers.
template <class Fn>
void parallel_slices(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&fn, n, workers, w] { fn(n * w / workers, n * (w + 1) / workers, w); });
  }
}

}  // namespace warpcone
