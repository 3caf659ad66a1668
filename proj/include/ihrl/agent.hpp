#pragma once

#include <cstdint>
#include <string>

#include "ihrl/env.hpp"

namespace ihrl {

struct EvalResult {
  int episodes = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double success_rate = 0.0;
  double mean_length = 0.0;
  long deaths = 0;
  long region_transitions = 0;  // alive moves between regions
};

struct AgentDiagnostics {
  long regions = 0;
  long options = 0;
  double edge_success = 0.0;
  long episodes = 0;
};

/// Common surface the harness drives. Training is resumable: an episode cut
/// by `until_steps` continues on the next call.
class Agent {
 public:
  virtual ~Agent() = default;

  /// Trains until the cumulative primitive step count reaches `until_steps`.
  virtual void train(const GridEnv& env, long until_steps) = 0;
  /// Runs `episodes` greedy episodes without touching training state.
  virtual EvalResult evaluate(const GridEnv& env, int episodes, std::uint64_t seed) const = 0;
  /// Prepares for a new task with a fresh step budget (transfer protocol).
  virtual void begin_task(long task_budget) = 0;
  virtual long steps() const = 0;
  virtual AgentDiagnostics diagnostics() const = 0;
};

}  // namespace ihrl
