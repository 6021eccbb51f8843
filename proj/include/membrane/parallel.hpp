#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace membrane {

// Every data-parallel kernel takes an Exec tag. The serial branch is the
// reference the tests compare against; both branches must give bitwise
// identical results, so kernels never reduce across loop iterations.
enum class Exec { serial, parallel };

int max_threads();
void set_num_threads(int n);

/// Runs f(i) for i in [0, n). Exceptions thrown by f are rethrown on the
/// calling thread (the first one wins).
template <class F>
void for_each_index(Exec exec, std::ptrdiff_t n, F&& f) {
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace membrane
