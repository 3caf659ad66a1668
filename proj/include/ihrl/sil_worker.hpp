#pragma once

#include <optional>
#include <vector>

#include "ihrl/mlp.hpp"
#include "ihrl/optimizer.hpp"
#include "ihrl/replay_buffer.hpp"
#include "ihrl/worker_types.hpp"

namespace ihrl {

struct SilConfig {
  std::vector<int> hidden{64, 64};
  double lr = 7e-4;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double max_grad_norm = 0.5;
  double entropy = 0.01;
  int n_step = 6;
  int sil_updates = 2;
  int sil_batch = 512;
  double sil_policy_weight = 1.0;
  double sil_value_weight = 0.01;
  std::size_t capacity = 10000;
  double priority_alpha = 0.6;
  double priority_beta = 0.4;
  double priority_floor = 1e-5;
  double gamma = 0.99;

  bool operator==(const SilConfig&) const = default;
};

/// Advantage actor-critic with n-step returns plus self-imitation from a
/// prioritized replay of past episodes. Separate policy and value networks.
class SilWorker {
 public:
  using Scalar = float;
  using Net = Mlp<Scalar>;
  using Matrix = Net::Matrix;

  SilWorker(SilConfig config, ObservationEncoder encoder, std::uint64_t seed);

  int act(const WorkerObs& obs, bool greedy, Rng& rng) const;
  std::vector<double> action_probabilities(const WorkerObs& obs) const;
  double state_value(const WorkerObs& obs) const;

  /// Feeds one transition; runs an on-policy update (plus self-imitation
  /// updates) every n steps and at episode end. `defer` only affects
  /// when the episode reaches the replay buffer (see end_episode).
  void observe(const WorkerStep& step, bool defer = false);
  /// Closes the episode. Its discounted returns go to the replay buffer,
  /// unless deferred, in which case the trajectory is handed back.
  std::optional<DeferredCredit> end_episode(bool defer);
  /// Adds the bonus to the final reward of a deferred trajectory and stores it.
  void credit(const DeferredCredit& deferred, double bonus);
  /// Stores an externally built episode (e.g. a relabeled one) in the replay.
  void add_episode(const std::vector<WorkerStep>& episode);

  void clear_replay() { replay_.clear(); }
  const PrioritizedReplay& replay() const { return replay_; }
  const SilConfig& config() const { return config_; }
  const ObservationEncoder& encoder() const { return encoder_; }
  const Net& policy() const { return policy_; }
  const Net& value() const { return value_; }
  Net& policy() { return policy_; }
  Net& value() { return value_; }
  Optimizer<Scalar>& policy_optimizer() { return policy_opt_; }
  Optimizer<Scalar>& value_optimizer() { return value_opt_; }
  const Optimizer<Scalar>& policy_optimizer() const { return policy_opt_; }
  const Optimizer<Scalar>& value_optimizer() const { return value_opt_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  long updates() const { return updates_; }

  /// Parameters and optimizer state; the replay buffer is not compared.
  bool operator==(const SilWorker& o) const;

 private:
  Matrix encode_batch(const std::vector<WorkerObs>& obs) const;
  void update_on_policy();
  void update_self_imitation();

  SilConfig config_;
  ObservationEncoder encoder_;
  Net policy_;
  Net value_;
  Optimizer<Scalar> policy_opt_;
  Optimizer<Scalar> value_opt_;
  PrioritizedReplay replay_;
  Rng rng_;
  std::vector<WorkerStep> rollout_;
  std::vector<WorkerStep> episode_;
  long updates_ = 0;
};

}  // namespace ihrl
