#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ihrl/compression.hpp"
#include "ihrl/env.hpp"
#include "ihrl/option.hpp"
#include "ihrl/worker.hpp"

namespace ihrl {

enum class TerminationCause { kReachedTarget, kWrongNeighbor, kTimeout, kTaskStateChange, kEnvTerminal };

std::string to_string(TerminationCause cause);

struct OptionRewardConfig {
  double success = 0.8;
  double failure = -0.1;

  bool operator==(const OptionRewardConfig&) const = default;
};

/// How one primitive step looks from inside an option.
struct OptionStepResult {
  double reward = 0.0;          // shaped option reward r_{z,z'}
  bool ends = false;            // the option terminates after this step
  bool worker_terminal = false; // the worker must not bootstrap past this step
  bool truncated = false;       // ended by the episode budget, not by the option MDP
  bool success = false;
  TerminationCause cause = TerminationCause::kTimeout;
};

/// Classifies `tr` for an option started in spec.key.region. `steps` counts
/// this step, so the timeout fires when steps == spec.step_limit.
OptionStepResult classify_option_step(const OptionSpec& spec, const Transition& tr, const Compression& f,
                                      int steps, const OptionRewardConfig& rewards = {});

inline double option_reward(const OptionSpec& spec, const Transition& tr, const Compression& f, int steps,
                            const OptionRewardConfig& rewards = {}) {
  return classify_option_step(spec, tr, f, steps, rewards).reward;
}

/// Uniform random primitive action.
inline int exploration_policy(Rng& rng) { return uniform_int(rng, 0, kNumActions - 1); }

struct RunOptionParams {
  bool learn = true;
  bool greedy = false;
  // Hold back the worker's final transition on success so a controllability
  // bonus can be added when its window matures.
  bool defer_success_credit = false;
  double gamma = 0.99;
  bool keep_trajectory = false;
};

struct OptionOutcome {
  GridState final_state;
  TerminationCause cause = TerminationCause::kTimeout;
  bool success = false;
  int duration = 0;
  double discounted_reward = 0.0;  // sum_i gamma^i r_i of task reward
  double total_reward = 0.0;       // undiscounted task reward
  double final_option_reward = 0.0;
  std::vector<WorkerStep> worker_steps;
  std::optional<DeferredCredit> deferred;
  std::vector<Transition> trajectory;  // only with keep_trajectory
};

/// Executes one option from `start` until it terminates. `worker` may be null
/// only for exploration options. Throws UsageError when `start` lies outside
/// the option's initiation region or is already terminal.
OptionOutcome run_option(const GridState& start, const OptionSpec& spec, const GridEnv& env,
                         const Compression& f, Worker* worker, Rng& env_rng, Rng& agent_rng,
                         const RunOptionParams& params = {}, const OptionRewardConfig& rewards = {});

/// Executes an option without any learning, so a const worker suffices.
OptionOutcome run_option_frozen(const GridState& start, const OptionSpec& spec, const GridEnv& env,
                                const Compression& f, const Worker* worker, Rng& env_rng, Rng& agent_rng,
                                bool greedy, double gamma = 0.99, const OptionRewardConfig& rewards = {});

struct MaturedCredit {
  OptionKey key;
  DeferredCredit credit;
  int successes = 0;
  int window = 0;  // options actually observed (M, or fewer on a flush)
  double rho = 0.0;
};

/// Delayed controllability credit rho = N/M over the M options that follow
/// each successful navigate option.
class ControllabilityTracker {
 public:
  explicit ControllabilityTracker(int horizon = 10);

  /// Counts one completed option against every pending window and returns
  /// the windows that reached M observations.
  std::vector<MaturedCredit> record_completion(bool success);
  void add_pending(const OptionKey& key, DeferredCredit credit);
  /// Matures every open window with rho = N/M' over the M' options seen so
  /// far (0 when none were seen).
  std::vector<MaturedCredit> flush();

  int horizon() const { return horizon_; }
  std::size_t pending() const { return pending_.size(); }

 private:
  struct Pending {
    OptionKey key;
    DeferredCredit credit;
    int observed = 0;
    int successes = 0;
  };
  int horizon_;
  std::vector<Pending> pending_;
};

}  // namespace ihrl
