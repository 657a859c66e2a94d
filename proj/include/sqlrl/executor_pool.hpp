#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace sqlrl {

struct PoolStats {
  std::size_t workers = 0;
  std::size_t busy = 0;
  std::size_t queued = 0;
  std::size_t completed = 0;
};

/// Fixed-size FIFO thread pool. Jobs must not block on other jobs of the
/// same pool.
class ExecutorPool {
 public:
  explicit ExecutorPool(std::size_t workers);
  ~ExecutorPool();

  ExecutorPool(const ExecutorPool&) = delete;
  ExecutorPool& operator=(const ExecutorPool&) = delete;

  template <typename F>
  auto submit(F&& fn) -> std::future<decltype(fn())> {
    using R = decltype(fn());
    auto promise = std::make_shared<std::promise<R>>();
    auto fut = promise->get_future();
    // Counters are settled before the future becomes ready.
    enqueue([this, promise, fn = std::forward<F>(fn)]() mutable {
      try {
        if constexpr (std::is_void_v<R>) {
          fn();
          finish_job();
          promise->set_value();
        } else {
          R value = fn();
          finish_job();
          promise->set_value(std::move(value));
        }
      } catch (...) {
        finish_job();
        promise->set_exception(std::current_exception());
      }
    });
    return fut;
  }

  PoolStats stats() const;

 private:
  void enqueue(std::function<void()> job);
  void worker_loop(std::stop_token stop);
  void finish_job();

  mutable std::mutex mu_;
  std::condition_variable_any cv_;
  std::deque<std::function<void()>> queue_;
  std::size_t busy_ = 0;
  std::size_t completed_ = 0;
  std::vector<std::jthread> threads_;
};

}  // namespace sqlrl
