#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>

namespace membrane::detail {

// 1/rcond, or infinity when the estimator breaks down on an exactly singular
// factorization (rcond 0 or NaN).
inline double condition_from_rcond(double rcond) {
  return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

// Small FIFO of immutable factorizations shared between threads. Builders run
// outside the lock; if two threads race on the same key both results are
// valid and the first one stored wins.
template <class T>
class FactorCache {
 public:
  explicit FactorCache(std::size_t capacity) : capacity_(capacity) {}

  template <class Match, class Make>
  std::shared_ptr<const T> get(Match&& match, Make&& make) {
    {
      std::lock_guard lock(mutex_);
      for (const auto& item : items_)
        if (match(*item)) return item;
    }
    std::shared_ptr<const T> built = make();
    std::lock_guard lock(mutex_);
    for (const auto& item : items_)
      if (match(*item)) return item;
    items_.push_back(built);
    if (items_.size() > capacity_) items_.pop_front();
    return built;
  }

  void clear() {
    std::lock_guard lock(mutex_);
    items_.clear();
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::deque<std::shared_ptr<const T>> items_;
};

void clear_rbf_cache();

}  // namespace membrane::detail
