#pragma once

// Index-ordered parallel map: fn(i) runs on worker threads, results land in
// slot i, and downstream reductions read them sequentially. The value for a
// given index never depends on scheduling, so results are reproducible for
// any thread count. Nested calls run serially to avoid oversubscription.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace alohar {

namespace detail {
inline thread_local bool in_parallel_worker = false;
}

template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers = std::min<std::size_t>(hw, n);
  if (workers <= 1 || detail::in_parallel_worker) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    detail::in_parallel_worker = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) break;
      try {
        out[i] = fn(i);
      } catch (...) {
        {
          std::scoped_lock lk(error_mu);
          if (!error) error = std::current_exception();
        }
        failed.store(true);
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace alohar
