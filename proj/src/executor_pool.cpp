#include "sqlrl/executor_pool.hpp"

#include <algorithm>

namespace sqlrl {

ExecutorPool::ExecutorPool(std::size_t workers) {
  workers = std::max<std::size_t>(1, workers);
  threads_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) {
    threads_.emplace_back([this](std::stop_token st) { worker_loop(st); });
  }
}

ExecutorPool::~ExecutorPool() {
  for (auto& t : threads_) t.request_stop();
  cv_.notify_all();
  threads_.clear();  // joins
}

void ExecutorPool::enqueue(std::function<void()> job) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(job));
  }
  cv_.notify_one();
}

void ExecutorPool::worker_loop(std::stop_token stop) {
  while (true) {
    std::function<void()> job;
    {
      std::unique_lock lock(mu_);
      if (!cv_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      ++busy_;
    }
    job();
  }
}

void ExecutorPool::finish_job() {
  std::lock_guard lock(mu_);
  --busy_;
  ++completed_;
}

PoolStats ExecutorPool::stats() const {
  std::lock_guard lock(mu_);
  return {threads_.size(), busy_, queue_.size(), completed_};
}

}  // namespace sqlrl
