#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace psc {

// Runs fn(task_index) for task_index in [0, tasks) on up to `threads` workers.
// Tasks are claimed from an atomic counter; callers that need determinism must
// write results into per-task slots and merge them in task order afterwards.
template <typename Fn>
void parallel_for(std::size_t tasks, int threads, Fn&& fn) {
  if (threads < 1) threads = 1;
  std::size_t nworkers = std::min<std::size_t>(static_cast<std::size_t>(threads), tasks);
  if (nworkers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nworkers);
  for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

inline int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace psc
