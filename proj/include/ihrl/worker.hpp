#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ihrl/sil_worker.hpp"
#include "ihrl/tabular_worker.hpp"

namespace ihrl {

enum class WorkerKind { kTabular, kSil };

std::string to_string(WorkerKind kind);
WorkerKind worker_kind_from_string(std::string_view s);

struct WorkerConfig {
  WorkerKind kind = WorkerKind::kTabular;
  TabularConfig tabular;
  SilConfig sil;

  bool operator==(const WorkerConfig&) const = default;
};

/// An option's learner: either a Q table or a self-imitation actor-critic.
class Worker {
 public:
  explicit Worker(TabularWorker w) : impl_(std::move(w)) {}
  explicit Worker(SilWorker w) : impl_(std::move(w)) {}

  WorkerKind kind() const { return impl_.index() == 0 ? WorkerKind::kTabular : WorkerKind::kSil; }

  int act(const WorkerObs& obs, bool greedy, Rng& rng) const;
  void observe(const WorkerStep& step, bool defer);
  std::optional<DeferredCredit> end_episode(bool defer);
  void credit(const DeferredCredit& deferred, double bonus);
  /// Learns from a trajectory this worker did not generate (hindsight relabeling).
  void learn_offline(const std::vector<WorkerStep>& trajectory);
  void clear_replay();

  TabularWorker* tabular() { return std::get_if<TabularWorker>(&impl_); }
  const TabularWorker* tabular() const { return std::get_if<TabularWorker>(&impl_); }
  SilWorker* sil() { return std::get_if<SilWorker>(&impl_); }
  const SilWorker* sil() const { return std::get_if<SilWorker>(&impl_); }

  bool operator==(const Worker& o) const { return impl_ == o.impl_; }

 private:
  std::variant<TabularWorker, SilWorker> impl_;
};

Worker make_worker(const WorkerConfig& config, const ObservationEncoder& encoder, std::uint64_t seed);

}  // namespace ihrl
