#pragma once

#include <cstddef>
#include <vector>

#include "ihrl/random.hpp"

namespace ihrl {

/// Self-imitation replay: FIFO ring of (observation, action, return) with
/// proportional prioritized sampling through a sum tree.
class PrioritizedReplay {
 public:
  struct Entry {
    std::vector<float> obs;
    int action = 0;
    double ret = 0.0;
  };
  struct Batch {
    std::vector<std::size_t> indices;
    std::vector<double> weights;  // importance weights normalized by the batch maximum
  };

  PrioritizedReplay(std::size_t capacity, double alpha, double floor);

  /// Stores with priority max(advantage^alpha, floor); evicts the oldest entry when full.
  std::size_t add(Entry entry, double clipped_advantage);
  void update(std::size_t index, double clipped_advantage);
  /// Draws `n` indices with replacement, P(i) = p_i / sum p.
  Batch sample(std::size_t n, double beta, Rng& rng) const;
  void clear();

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  const Entry& entry(std::size_t index) const { return entries_[index]; }
  double priority(std::size_t index) const { return tree_[leaf(index)]; }
  double probability(std::size_t index) const { return priority(index) / total(); }
  double total() const { return tree_[1]; }
  double priority_of(double clipped_advantage) const;

 private:
  std::size_t leaf(std::size_t index) const { return leaves_ + index; }
  void set(std::size_t index, double p);

  std::size_t capacity_;
  double alpha_;
  double floor_;
  std::size_t leaves_;
  std::vector<double> tree_;  // 1-based heap layout, leaves at [leaves_, 2*leaves_)
  std::vector<Entry> entries_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

}  // namespace ihrl
