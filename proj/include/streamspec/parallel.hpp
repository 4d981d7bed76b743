#pragma once

#include <cstddef>
#include <exception>
#include <string>

namespace streamspec {

/// Every per-point kernel exists in a serial reference form and an OpenMP
/// form; both must produce identical results.
enum class Execution { serial, parallel };

std::string to_string(Execution e);

/// Run body(i) for i in [0, n). Results must be written to slot i only, so
/// the output order never depends on scheduling. The first exception thrown
/// by any iteration is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(streamspec_exception)
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

/// Number of OpenMP threads a parallel region would use.
int max_threads();

}  // namespace streamspec
