#pragma once
// Episode-level parallelism. Episodes are independent (disjoint worlds and
// seeds), so the only parallel primitive needed is an index loop whose body
// writes results into pre-sized slots. workers <= 1 runs the serial reference
// path; the two paths must produce identical results and the test suite and
// benchmark both check that.

#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wes::parallel {

inline int hardware_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Resolves a worker count: explicit request > WES_SIM_WORKERS > hardware.
inline int resolve_workers(int requested) {
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("WES_SIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  return hardware_workers();
}

template <typename Fn>
void for_each_index(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
#ifdef _OPENMP
  std::mutex error_mutex;
  std::string first_error;
  bool failed = false;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (const std::exception& ex) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!failed) {
        failed = true;
        first_error = ex.what();
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!failed) {
        failed = true;
        first_error = "unknown error in parallel region";
      }
    }
  }
  if (failed) {
    throw std::runtime_error(first_error);
  }
#else
  for (std::size_t i = 0; i < n; ++i) {
    fn(i);
  }
#endif
}

}  // namespace wes::parallel
