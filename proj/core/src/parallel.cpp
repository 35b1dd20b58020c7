#include "torus_lab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace torus_lab {
namespace {

std::atomic<unsigned> g_threads{0};

unsigned resolve_auto() {
  if (const char* env = std::getenv("TORUS_LAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_thread_count(unsigned threads) { g_threads.store(threads); }

unsigned thread_count() {
  const unsigned t = g_threads.load();
  return t == 0 ? resolve_auto() : t;
}

unsigned worker_count(std::size_t tasks) {
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), tasks)));
}

void parallel_for(std::size_t tasks, const std::function<void(unsigned, std::size_t)>& fn) {
  if (tasks == 0) return;
  const unsigned workers = worker_count(tasks);
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(0, t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](unsigned worker) {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      try {
        fn(worker, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body, w);
  body(0);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace torus_lab
