#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace cdp {

/// Runs body(i, acc) for i in [0, count) on `threads` workers with
/// contiguous chunks, then merges the per-worker accumulators in worker
/// order. Accumulators must satisfy acc.merge(other) and be
/// default-constructible; with integer counts the result does not depend on
/// the number of workers.
template <class Acc, class Body>
Acc parallel_accumulate(std::uint64_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    Acc acc;
    for (std::uint64_t i = 0; i < count; ++i) body(i, acc);
    return acc;
  }
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  std::vector<Acc> partial(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      const std::uint64_t begin = count * w / threads;
      const std::uint64_t end = count * (w + 1) / threads;
      try {
        for (std::uint64_t i = begin; i < end; ++i) body(i, partial[w]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Acc total;
  for (auto& p : partial) total.merge(p);
  return total;
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace cdp
