#include "fracvar/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fracvar {

unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FRACVAR_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t min_chunk) {
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(thread_budget(), (n + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      for (;;) {
        std::size_t start = next.fetch_add(min_chunk);
        if (start >= n) break;
        std::size_t stop = std::min(n, start + min_chunk);
        for (std::size_t i = start; i < stop; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next.store(n);
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fracvar
