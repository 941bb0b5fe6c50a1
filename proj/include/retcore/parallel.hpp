#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace retcore {

// Splits [0, count) into at most `threads` contiguous chunks and runs
// fn(begin, end) on each. Chunk boundaries depend only on count and the
// thread count, and each index is processed exactly once, so any per-index
// work that is itself deterministic yields identical results at any thread
// count. The first exception thrown by a worker is rethrown to the caller.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  if (count == 0) return;
  if (threads <= 1 || count == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t n_chunks = std::min<std::size_t>(threads, count);
  const std::size_t base = count / n_chunks;
  const std::size_t rem = count % n_chunks;

  std::vector<std::thread> workers;
  workers.reserve(n_chunks);
  std::exception_ptr error;
  std::mutex error_mutex;

  std::size_t begin = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t end = begin + base + (c < rem ? 1 : 0);
    workers.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

unsigned resolve_thread_count(int requested);

}  // namespace retcore
