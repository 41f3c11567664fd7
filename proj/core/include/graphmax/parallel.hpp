#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace graphmax {

// Runs fn(worker, begin, end) over contiguous chunks of [0, total); chunk
// boundaries depend only on (total, workers), so a fixed worker count gives a
// fixed work split. workers == 1 runs inline.
inline void parallel_chunks(int total, int workers, const std::function<void(int, int, int)>& fn) {
  if (workers < 1) workers = 1;
  if (workers > total) workers = total > 0 ? total : 1;
  if (workers == 1) {
    fn(0, 0, total);
    return;
  }
  int base = total / workers;
  int extra = total % workers;
  std::vector<std::thread> threads;
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  int begin = 0;
  for (int w = 0; w < workers; ++w) {
    int len = base + (w < extra ? 1 : 0);
    int end = begin + len;
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace graphmax
