#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace entorder::parallel {

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
#endif
}

// threads == 0 means "use all"; threads == 1 forces the serial path.
inline int resolve_threads(int threads) {
  return threads <= 0 ? hardware_threads() : threads;
}

// Serial reference path. Kept separate so tests and the benchmark can
// compare it bit-for-bit against the OpenMP path.
template <typename T, typename Fn>
std::vector<T> map_indexed_serial(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

// Parallel map over [0, n). Each element depends only on its index, so the
// result is identical for every thread count.
template <typename T, typename Fn>
std::vector<T> map_indexed(std::size_t n, Fn&& fn, int threads = 0) {
  const int workers = resolve_threads(threads);
#ifdef _OPENMP
  if (workers > 1 && n > 1) {
    std::vector<T> out(n);
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical
        {
          if (!first_error) first_error = std::current_exception();
        }
      }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
  }
#else
  (void)workers;
#endif
  return map_indexed_serial<T>(n, fn);
}

}  // namespace entorder::parallel
