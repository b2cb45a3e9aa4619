#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace atba {

// Runs fn(i) for i in [0, count) on up to `threads` workers. If any call
// throws, the exception raised by the lowest index is rethrown after all
// workers join, so a parallel run fails the same way the serial loop would.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }

  const int workers = std::min(threads, count);
  std::atomic<int> cursor{0};
  std::mutex error_mutex;
  int error_index = count;
  std::exception_ptr error;

  auto body = [&] {
    while (true) {
      const int i = cursor.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace atba
