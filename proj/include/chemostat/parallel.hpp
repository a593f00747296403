#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <vector>

namespace chemostat {

// Serial is the reference path; Parallel runs replicas under OpenMP. Both
// produce identical results because every replica owns its stream and
// reductions happen afterwards in replica order.
enum class Execution { Serial, Parallel };

// Worker count for Parallel execution: CHEMOSTAT_WORKERS if set to a positive
// integer, otherwise the OpenMP default.
int worker_count();

inline constexpr const char* kWorkersEnv = "CHEMOSTAT_WORKERS";

// Evaluates task(r) for r in [0, n) and returns results indexed by r. The
// exception of the lowest failing replica is rethrown after all workers finish.
template <class Task>
auto run_replicas(std::size_t n, Execution exec, Task&& task) -> std::vector<decltype(task(std::size_t{}))> {
  using Result = decltype(task(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);

  auto one = [&](std::size_t r) {
    try {
      slots[r].emplace(task(r));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  if (exec == Execution::Serial || n < 2) {
    for (std::size_t r = 0; r < n; ++r) one(r);
  } else {
    const int workers = worker_count();
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long long r = 0; r < count; ++r) one(static_cast<std::size_t>(r));
  }

  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace chemostat
