#pragma once

#include <cstddef>
#include <functional>

namespace torus_lab {

/// Worker count used by all parallel loops. 0 selects automatically:
/// TORUS_LAB_THREADS if set, otherwise hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs fn(worker, task) once for every task in [0, tasks). Tasks are
/// claimed dynamically, so results must be written per task (or merged
/// with an order-independent reduction) to stay deterministic.
void parallel_for(std::size_t tasks, const std::function<void(unsigned worker, std::size_t task)>& fn);

/// Number of workers parallel_for will use for `tasks` tasks.
unsigned worker_count(std::size_t tasks);

}  // namespace torus_lab
