#pragma once

#include <array>
#include <map>
#include <optional>

#include "ihrl/random.hpp"
#include "ihrl/worker_types.hpp"

namespace ihrl {

struct TabularConfig {
  double alpha = 0.1;    // learning rate
  double epsilon = 0.05; // exploration while training
  double gamma = 0.99;
  // Value of every action in a cell the worker has not updated yet.
  double initial_q = 0.0;

  bool operator==(const TabularConfig&) const = default;
};

/// Q-learning over the cells of one option MDP. Neighbor regions are
/// terminal super-states and never get table entries.
class TabularWorker {
 public:
  using Row = std::array<double, kNumActions>;

  explicit TabularWorker(TabularConfig config = {}) : config_(config) {}

  int act(const WorkerObs& obs, bool greedy, Rng& rng) const;
  /// Applies the one-step update, or holds it back when `defer` is set.
  void observe(const WorkerStep& step, bool defer = false);
  std::optional<DeferredCredit> end_episode(bool defer);
  /// Terminal update of the held-back final transition with reward r + bonus.
  void credit(const DeferredCredit& deferred, double bonus);

  /// Q(s,a) <- Q(s,a) + alpha (r + gamma [terminal ? 0 : max Q(s',.)] - Q(s,a))
  void update(Cell s, int a, double r, Cell next, bool terminal);

  double q(Cell s, int a) const;
  double value(Cell s) const;
  const std::map<Cell, Row>& table() const { return q_; }
  std::map<Cell, Row>& table() { return q_; }
  Row initial_row() const;
  const TabularConfig& config() const { return config_; }
  TabularConfig& config() { return config_; }

  bool operator==(const TabularWorker& o) const { return config_ == o.config_ && q_ == o.q_; }

 private:
  TabularConfig config_;
  std::map<Cell, Row> q_;
  std::optional<WorkerStep> held_;
};

}  // namespace ihrl
