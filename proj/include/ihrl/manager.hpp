#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ihrl/option.hpp"
#include "ihrl/random.hpp"
#include "ihrl/worker.hpp"

namespace ihrl {

/// Abstract state of the task SMDP: region plus task flags.
struct ManagerState {
  RegionId region = kNoRegion;
  Inventory task = 0;
  auto operator<=>(const ManagerState&) const = default;
};

struct ManagerConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon_start = 0.05;
  double epsilon_end = 0.005;
  long decay_steps = 100000;  // primitive steps over which epsilon decays linearly

  bool operator==(const ManagerConfig&) const = default;
};

/// Tabular SMDP Q-learning over (region, task state) x option. Entries are
/// created lazily at 0 on first update.
class ManagerQ {
 public:
  using Key = std::pair<ManagerState, OptionKey>;

  explicit ManagerQ(ManagerConfig config = {}) : config_(config) {}

  double q(const ManagerState& s, const OptionKey& o) const;
  double max_q(const ManagerState& s, std::span<const OptionKey> admissible) const;

  /// Epsilon-greedy with uniform tie breaking. Throws UsageError for an empty
  /// set or an option from another region.
  OptionKey get_option(const ManagerState& s, std::span<const OptionKey> admissible, double epsilon,
                       Rng& rng) const;

  /// Q(s,o) += alpha (R + gamma^k max_o' Q(s',o') - Q(s,o)); the bootstrap is
  /// dropped when `terminal`. Returns the new value.
  double update(const ManagerState& s, const OptionKey& o, double discounted_reward, int duration,
                const ManagerState& next, std::span<const OptionKey> next_admissible, bool terminal);

  /// Linear schedule from epsilon_start to epsilon_end over decay_steps.
  double epsilon(long step) const;

  void clear() { q_.clear(); }
  const std::map<Key, double>& entries() const { return q_; }
  void set(const ManagerState& s, const OptionKey& o, double v) { q_[{s, o}] = v; }
  const ManagerConfig& config() const { return config_; }
  ManagerConfig& config() { return config_; }

  /// Rows "region,task,option,value".
  std::string to_csv() const;

  bool operator==(const ManagerQ& o) const { return config_ == o.config_ && q_ == o.q_; }

 private:
  ManagerConfig config_;
  std::map<Key, double> q_;
};

/// Discovered task states and the task options o_z^{s,s'} with their workers.
class TaskStateRegistry {
 public:
  struct Discovery {
    bool new_state = false;
    bool new_option = false;
  };

  TaskStateRegistry(WorkerConfig worker_config, ObservationEncoder encoder, std::uint64_t seed);

  bool register_state(Inventory s) { return states_.insert(s).second; }
  /// Registers s' and the task option that changes s into s' inside z.
  Discovery observe_task_change(RegionId z, Inventory s, Inventory s2);

  /// Task options that can start in (z, s).
  std::vector<OptionKey> options(RegionId z, Inventory s) const;
  bool has_option(const OptionKey& key) const { return workers_.count(key) > 0; }
  Worker& worker(const OptionKey& key);
  const Worker& worker(const OptionKey& key) const;

  const std::set<Inventory>& states() const { return states_; }
  const std::map<OptionKey, Worker>& workers() const { return workers_; }
  std::size_t num_options() const { return workers_.size(); }
  void clear();

  void restore_option(const OptionKey& key, Worker worker);

  bool operator==(const TaskStateRegistry& o) const {
    return worker_config_ == o.worker_config_ && encoder_ == o.encoder_ && seed_ == o.seed_ &&
           states_ == o.states_ && workers_ == o.workers_;
  }

 private:
  WorkerConfig worker_config_;
  ObservationEncoder encoder_;
  std::uint64_t seed_;
  std::set<Inventory> states_;
  std::map<OptionKey, Worker> workers_;
};

}  // namespace ihrl
