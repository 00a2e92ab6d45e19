#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace loschmidt {

unsigned default_thread_count();

// Runs body(worker_index, item) for item in [0, count) on `threads` workers.
// make_state(worker_index) builds per-worker scratch (e.g. FFT plans); items
// are claimed dynamically, so bodies must write only to item-indexed slots.
// The first exception thrown by any body is rethrown after all workers join.
template <typename MakeState, typename Body>
void parallel_for(std::size_t count, unsigned threads, MakeState make_state, Body body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&](unsigned w) {
    try {
      auto state = make_state(w);
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        body(state, i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace loschmidt
