#include "ihrl/tabular_worker.hpp"

#include <algorithm>

namespace ihrl {

TabularWorker::Row TabularWorker::initial_row() const {
  Row row;
  row.fill(config_.initial_q);
  return row;
}

double TabularWorker::q(Cell s, int a) const {
  auto it = q_.find(s);
  return it == q_.end() ? config_.initial_q : it->second[static_cast<std::size_t>(a)];
}

double TabularWorker::value(Cell s) const {
  auto it = q_.find(s);
  if (it == q_.end()) return config_.initial_q;
  return *std::max_element(it->second.begin(), it->second.end());
}

int TabularWorker::act(const WorkerObs& obs, bool greedy, Rng& rng) const {
  if (!greedy && config_.epsilon > 0 && uniform01(rng) < config_.epsilon)
    return uniform_int(rng, 0, kNumActions - 1);
  Row row = initial_row();
  if (auto it = q_.find(obs.cell()); it != q_.end()) row = it->second;
  const double best = *std::max_element(row.begin(), row.end());
  int ties[kNumActions];
  int n = 0;
  for (int a = 0; a < kNumActions; ++a)
    if (row[static_cast<std::size_t>(a)] == best) ties[n++] = a;
  return n == 1 ? ties[0] : ties[uniform_int(rng, 0, n - 1)];
}

void TabularWorker::update(Cell s, int a, double r, Cell next, bool terminal) {
  const double bootstrap = terminal ? 0.0 : value(next);
  auto& row = q_.try_emplace(s, initial_row()).first->second;
  double& entry = row[static_cast<std::size_t>(a)];
  entry += config_.alpha * (r + config_.gamma * bootstrap - entry);
}

void TabularWorker::observe(const WorkerStep& step, bool defer) {
  if (defer) {
    held_ = step;
    return;
  }
  // Truncated steps bootstrap: the option MDP itself did not end there.
  update(step.obs.cell(), step.action, step.reward, step.next_obs.cell(), step.terminal);
}

std::optional<DeferredCredit> TabularWorker::end_episode(bool defer) {
  if (!held_) return std::nullopt;
  DeferredCredit out{{*held_}};
  held_.reset();
  if (!defer) {
    credit(out, 0.0);
    return std::nullopt;
  }
  return out;
}

void TabularWorker::credit(const DeferredCredit& deferred, double bonus) {
  if (deferred.trajectory.empty()) return;
  const WorkerStep& last = deferred.trajectory.back();
  update(last.obs.cell(), last.action, last.reward + bonus, last.next_obs.cell(), last.terminal);
}

}  // namespace ihrl
