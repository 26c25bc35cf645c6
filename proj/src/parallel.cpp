#include "tariffkit/parallel.hpp"

#include <omp.h>

#include <atomic>

#include "tariffkit/errors.hpp"

namespace tariffkit {

namespace {
std::atomic<int> g_threads{0};
}

std::string_view to_string(Execution exec) {
  return exec == Execution::serial ? "serial" : "parallel";
}

Execution parse_execution(std::string_view text) {
  if (text == "serial") return Execution::serial;
  if (text == "parallel") return Execution::parallel;
  throw ConfigError("execution must be 'serial' or 'parallel'");
}

void set_parallel_threads(int threads) { g_threads = threads < 0 ? 0 : threads; }

int parallel_threads() {
  const int t = g_threads.load();
  return t > 0 ? t : omp_get_max_threads();
}

namespace detail {

void run_indexed_parallel(std::size_t n, void (*thunk)(void*, std::size_t), void* ctx,
                          std::vector<std::exception_ptr>& errors) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(parallel_threads())
  for (long long i = 0; i < count; ++i) {
    try {
      thunk(ctx, static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
}

}  // namespace detail
}  // namespace tariffkit
