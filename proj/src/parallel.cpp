#include "stirlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stirlab {

std::size_t worker_count() {
  static const std::size_t n = [] {
    if (const char* env = std::getenv("STIRLAB_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return std::min<std::size_t>(static_cast<std::size_t>(v), 8);
    }
    return std::size_t{1};
  }();
  return n;
}

namespace detail {

void parallel_for_impl(std::size_t n, void* ctx, void (*fn)(void*, std::size_t)) {
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) fn(ctx, i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(ctx, i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

double ordered_sum(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

}  // namespace stirlab
