#include "wq/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wq {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WQ_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& block_fn) {
  const std::int64_t total = end - begin;
  if (total <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), total));
  if (workers <= 1) {
    block_fn(begin, end);
    return;
  }
  const std::int64_t chunk = (total + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + w * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        block_fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wq
