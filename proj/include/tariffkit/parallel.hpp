#pragma once

#include <cstddef>
#include <exception>
#include <string_view>
#include <type_traits>
#include <vector>

namespace tariffkit {

// Every data-parallel kernel in the library (Monte Carlo replications,
// calibration grid points) has a serial reference path and an OpenMP path.
// Both must produce bit-identical results: each index writes only its own
// output slot and all reductions happen afterwards in index order.
enum class Execution { serial, parallel };

std::string_view to_string(Execution exec);
Execution parse_execution(std::string_view text);

// Number of OpenMP threads used by Execution::parallel (0 = runtime default).
void set_parallel_threads(int threads);
int parallel_threads();

namespace detail {
void run_indexed_parallel(std::size_t n, void (*thunk)(void*, std::size_t), void* ctx,
                          std::vector<std::exception_ptr>& errors);
}

/// Calls body(i) for i in [0, n). Under Execution::parallel the calls are
/// distributed over OpenMP threads; the first exception (lowest index) is
/// rethrown after the loop completes.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  using Fn = std::remove_reference_t<Body>;
  std::vector<std::exception_ptr> errors(n);
  auto thunk = [](void* ctx, std::size_t i) { (*static_cast<Fn*>(ctx))(i); };
  detail::run_indexed_parallel(n, thunk, const_cast<void*>(static_cast<const void*>(&body)),
                               errors);
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace tariffkit
