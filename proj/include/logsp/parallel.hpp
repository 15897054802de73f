#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace logsp {

/// Worker cap: LOGSP_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("LOGSP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return unsigned(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [begin, end) on contiguous blocks. Each index is
/// handled by exactly one worker, so results do not depend on the thread count
/// as long as fn(i) writes only to slot i.
template <typename Fn>
void parallel_for(long begin, long end, Fn&& fn) {
  const long total = end - begin;
  if (total <= 0) return;
  const long workers = std::min<long>(worker_count(), total);
  if (workers <= 1) {
    for (long i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const long chunk = (total + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    const long lo = begin + w * chunk;
    const long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace logsp
