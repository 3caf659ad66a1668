#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ihrl/agent.hpp"
#include "ihrl/manager.hpp"
#include "ihrl/option_runtime.hpp"
#include "ihrl/region_graph.hpp"

namespace ihrl {

struct HrlConfig {
  WorkerConfig worker;
  CompressionSpec compression;
  ManagerConfig manager;
  OptionRewardConfig rewards;
  bool controllability = false;
  int controllability_horizon = 10;
  // Hindsight relabeling: a wrong-neighbor exit also trains the option that
  // targets the neighbor actually reached.
  bool relabel = false;
  double gamma = 0.99;
};

struct OptionEvent {
  long episode = 0;
  long step = 0;  // cumulative primitive steps when the option ended
  OptionKey option;
  TerminationCause cause = TerminationCause::kTimeout;
  bool success = false;
  int duration = 0;
  double option_reward = 0.0;
  double task_reward = 0.0;
};

/// Controllability credit delivered to an earlier navigate option.
struct CreditEvent {
  long step = 0;
  OptionKey option;
  int successes = 0;
  int window = 0;
  double rho = 0.0;
};

/// Region-level manager over learned options, grown online from the
/// compression function.
class HrlAgent : public Agent {
 public:
  HrlAgent(HrlConfig config, int width, int height, std::uint64_t seed);

  void train(const GridEnv& env, long until_steps) override;
  EvalResult evaluate(const GridEnv& env, int episodes, std::uint64_t seed) const override;
  void begin_task(long task_budget) override;
  long steps() const override { return steps_; }
  AgentDiagnostics diagnostics() const override;

  /// Clears the manager and task registry; the region graph and its
  /// navigate workers stay as they are.
  void reset_for_transfer();

  /// Options the manager may pick in state s (navigate + task + exploration).
  std::vector<OptionKey> admissible_options(const ManagerState& s) const;

  void set_option_sink(std::function<void(const OptionEvent&)> sink) { option_sink_ = std::move(sink); }
  void set_credit_sink(std::function<void(const CreditEvent&)> sink) { credit_sink_ = std::move(sink); }

  const HrlConfig& config() const { return config_; }
  const Compression& compression() const { return f_; }
  const RegionGraph& graph() const { return graph_; }
  RegionGraph& graph() { return graph_; }
  const ManagerQ& manager() const { return manager_; }
  ManagerQ& manager() { return manager_; }
  const TaskStateRegistry& registry() const { return registry_; }
  TaskStateRegistry& registry() { return registry_; }
  std::uint64_t seed() const { return seed_; }

  /// Learned state used by persistence and equality checks.
  bool same_learned_state(const HrlAgent& o) const {
    return graph_ == o.graph_ && manager_ == o.manager_ && registry_ == o.registry_;
  }

 private:
  Worker* worker_for(const OptionKey& key);
  const Worker* worker_for(const OptionKey& key) const;
  void start_episode(const GridEnv& env);
  void end_episode();
  void apply_credits(std::vector<MaturedCredit> matured);

  HrlConfig config_;
  std::uint64_t seed_;
  Compression f_;
  RegionGraph graph_;
  ManagerQ manager_;
  TaskStateRegistry registry_;
  ControllabilityTracker tracker_;
  Rng env_rng_;
  Rng agent_rng_;
  long steps_ = 0;
  long task_start_ = 0;
  long episodes_ = 0;
  std::optional<GridState> current_;
  std::function<void(const OptionEvent&)> option_sink_;
  std::function<void(const CreditEvent&)> credit_sink_;
};

}  // namespace ihrl
