#include "ihrl/replay_buffer.hpp"

#include <algorithm>
#include <cmath>

#include "ihrl/errors.hpp"

namespace ihrl {

PrioritizedReplay::PrioritizedReplay(std::size_t capacity, double alpha, double floor)
    : capacity_(capacity), alpha_(alpha), floor_(floor) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
  if (floor <= 0) throw ConfigError("priority floor must be positive");
  leaves_ = 1;
  while (leaves_ < capacity_) leaves_ <<= 1;
  tree_.assign(2 * leaves_, 0.0);
  entries_.resize(capacity_);
}

double PrioritizedReplay::priority_of(double clipped_advantage) const {
  return std::max(std::pow(std::max(clipped_advantage, 0.0), alpha_), floor_);
}

void PrioritizedReplay::set(std::size_t index, double p) {
  std::size_t node = leaf(index);
  tree_[node] = p;
  for (node >>= 1; node >= 1; node >>= 1) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

std::size_t PrioritizedReplay::add(Entry entry, double clipped_advantage) {
  const std::size_t index = next_;
  entries_[index] = std::move(entry);
  set(index, priority_of(clipped_advantage));
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  return index;
}

void PrioritizedReplay::update(std::size_t index, double clipped_advantage) {
  if (index >= size_) throw UsageError("replay index out of range");
  set(index, priority_of(clipped_advantage));
}

PrioritizedReplay::Batch PrioritizedReplay::sample(std::size_t n, double beta, Rng& rng) const {
  if (size_ == 0) throw UsageError("sampling from an empty replay buffer");
  Batch batch;
  batch.indices.reserve(n);
  batch.weights.reserve(n);
  const double sum = total();
  std::uniform_real_distribution<double> dist(0.0, sum);
  double max_w = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double u = dist(rng);
    std::size_t node = 1;
    while (node < leaves_) {
      const std::size_t left = 2 * node;
      if (u < tree_[left] || tree_[left + 1] <= 0.0) {
        node = left;
      } else {
        u -= tree_[left];
        node = left + 1;
      }
    }
    std::size_t index = node - leaves_;
    if (index >= size_) index = size_ - 1;  // guards rounding at the right edge
    const double p = tree_[leaf(index)] / sum;
    const double w = std::pow(double(size_) * p, -beta);
    max_w = std::max(max_w, w);
    batch.indices.push_back(index);
    batch.weights.push_back(w);
  }
  for (double& w : batch.weights) w /= max_w;
  return batch;
}

void PrioritizedReplay::clear() {
  std::fill(tree_.begin(), tree_.end(), 0.0);
  for (auto& e : entries_) e = Entry{};
  next_ = 0;
  size_ = 0;
}

}  // namespace ihrl
