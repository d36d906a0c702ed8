#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace recipnet {

/// Number of workers: `RECIPNET_WORKERS` when set, else the hardware count.
std::size_t worker_count();

/// Runs `body(begin, end)` over a static partition of [0, n).
///
/// Chunks are fixed by `n` and the worker count only, so any body that writes
/// to disjoint per-index slots produces identical results for every run.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 256) {
  if (n == 0) return;
  std::size_t workers = worker_count();
  if (min_chunk > 0) workers = std::min(workers, (n + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t step = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t begin = std::min(n, w * step);
      const std::size_t end = std::min(n, begin + step);
      threads.emplace_back([&, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    try {
      body(std::size_t{0}, std::min(n, step));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sum with a fixed binary-tree association order.
double pairwise_sum(std::span<const double> values);

}  // namespace recipnet
