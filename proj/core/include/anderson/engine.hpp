#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace anderson {

/// Bounded worker pool size. Results never depend on it.
struct Executor {
  std::size_t workers = 1;
};

class TaskError : public std::runtime_error {
 public:
  TaskError(const std::string& what, std::size_t task) : std::runtime_error(what), task_(task) {}
  std::size_t task() const noexcept { return task_; }

 private:
  std::size_t task_;
};

/// Runs task(i) for i in [0, n) on at most ex.workers threads, then folds the
/// results with reduce(acc, result) in ascending i. A failing task stops the
/// remaining ones; the failure with the lowest index is rethrown as TaskError.
template <class Task, class T, class Reduce>
T parallel_map_reduce(const Executor& ex, std::size_t n, Task&& task, T init, Reduce&& reduce) {
  using R = decltype(task(std::size_t{0}));
  std::vector<std::optional<R>> results(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex mu;
  std::size_t failed_at = n;
  std::string failure;

  auto worker = [&] {
    for (;;) {
      if (abort.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i].emplace(task(i));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = e.what();
        }
        abort = true;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = "unknown error";
        }
        abort = true;
      }
    }
  };

  const std::size_t threads = std::min(std::max<std::size_t>(ex.workers, 1), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed_at < n)
    throw TaskError("task " + std::to_string(failed_at) + " failed: " + failure, failed_at);

  T acc = std::move(init);
  for (auto& r : results) acc = reduce(std::move(acc), std::move(*r));
  return acc;
}

/// Results of task(i) in index order.
template <class Task>
auto parallel_map(const Executor& ex, std::size_t n, Task&& task) {
  using R = decltype(task(std::size_t{0}));
  return parallel_map_reduce(ex, n, task, std::vector<R>{}, [](std::vector<R> acc, R r) {
    acc.push_back(std::move(r));
    return acc;
  });
}

/// Count, sum and sum of squares; merging is exact in a fixed order.
struct Accumulator {
  std::size_t count = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) noexcept {
    ++count;
    sum += x;
    sumsq += x * x;
  }
  void merge(const Accumulator& o) noexcept {
    count += o.count;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  double mean() const noexcept { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const noexcept {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    return std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
  }
  double stderr_mean() const noexcept {
    return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace anderson
