#pragma once

#include <map>
#include <optional>
#include <tuple>

#include "ihrl/agent.hpp"
#include "ihrl/sil_worker.hpp"

namespace ihrl {

struct FlatConfig {
  SilConfig sil = [] {
    SilConfig c;
    c.sil_updates = 4;
    return c;
  }();
  bool count_bonus = false;  // SIL-EXP when set
  double beta = 0.2;
};

/// Visit counts N(s) over (x, y, inventory) with bonus beta / sqrt(N(s)).
class CountBonus {
 public:
  explicit CountBonus(double beta = 0.2) : beta_(beta) {}

  /// Increments N(s), then returns beta / sqrt(N(s)).
  double visit(const WorkerObs& s);
  long count(const WorkerObs& s) const;
  void clear() { counts_.clear(); }
  double beta() const { return beta_; }

 private:
  double beta_;
  std::map<std::tuple<int, int, int>, long> counts_;
};

/// One self-imitation actor-critic over the full task observation and the
/// primitive actions, optionally with a count-based exploration bonus.
class FlatAgent : public Agent {
 public:
  FlatAgent(FlatConfig config, int width, int height, std::uint64_t seed);

  void train(const GridEnv& env, long until_steps) override;
  EvalResult evaluate(const GridEnv& env, int episodes, std::uint64_t seed) const override;
  /// Clears the replay buffer and the visit counts; network weights carry over.
  void begin_task(long task_budget) override;
  long steps() const override { return steps_; }
  AgentDiagnostics diagnostics() const override { return {0, 0, 0.0, episodes_}; }

  const SilWorker& worker() const { return worker_; }
  const CountBonus& counts() const { return bonus_; }

 private:
  FlatConfig config_;
  SilWorker worker_;
  CountBonus bonus_;
  Rng env_rng_;
  Rng agent_rng_;
  long steps_ = 0;
  long episodes_ = 0;
  std::optional<GridState> current_;
};

}  // namespace ihrl
