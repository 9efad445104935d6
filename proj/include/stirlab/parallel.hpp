#pragma once

#include <cstddef>
#include <span>

namespace stirlab {

/// Number of worker threads used by parallel_for.  Reads STIRLAB_THREADS
/// once (clamped to [1, 8]); defaults to 1 so results never depend on the
/// machine.  All reductions in the library are ordered, so the worker
/// count never changes any computed value, only wall time.
std::size_t worker_count();

namespace detail {
void parallel_for_impl(std::size_t n, void* ctx, void (*fn)(void*, std::size_t));
}

/// Runs fn(i) for i in [0, n), chunked over worker_count() threads.
/// fn must only write to slots owned by index i (no shared accumulation);
/// exceptions thrown by fn are rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  detail::parallel_for_impl(n, &fn, [](void* ctx, std::size_t i) {
    (*static_cast<Fn*>(ctx))(i);
  });
}

/// Sums in strictly increasing index order regardless of how the values
/// were produced, keeping quadrature results byte-reproducible.
double ordered_sum(std::span<const double> values);

}  // namespace stirlab
