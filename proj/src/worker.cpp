#include "ihrl/worker.hpp"

#include "ihrl/errors.hpp"

namespace ihrl {

std::string to_string(WorkerKind kind) { return kind == WorkerKind::kTabular ? "tabular" : "sil"; }

WorkerKind worker_kind_from_string(std::string_view s) {
  if (s == "tabular") return WorkerKind::kTabular;
  if (s == "sil") return WorkerKind::kSil;
  throw ConfigError("unknown worker kind '" + std::string(s) + "'");
}

int Worker::act(const WorkerObs& obs, bool greedy, Rng& rng) const {
  return std::visit([&](const auto& w) { return w.act(obs, greedy, rng); }, impl_);
}

void Worker::observe(const WorkerStep& step, bool defer) {
  std::visit([&](auto& w) { w.observe(step, defer); }, impl_);
}

std::optional<DeferredCredit> Worker::end_episode(bool defer) {
  return std::visit([&](auto& w) { return w.end_episode(defer); }, impl_);
}

void Worker::credit(const DeferredCredit& deferred, double bonus) {
  std::visit([&](auto& w) { w.credit(deferred, bonus); }, impl_);
}

void Worker::learn_offline(const std::vector<WorkerStep>& trajectory) {
  if (auto* t = tabular()) {
    for (const auto& s : trajectory)
      t->update(s.obs.cell(), s.action, s.reward, s.next_obs.cell(), s.terminal);
  } else {
    sil()->add_episode(trajectory);
  }
}

void Worker::clear_replay() {
  if (auto* s = sil()) s->clear_replay();
}

Worker make_worker(const WorkerConfig& config, const ObservationEncoder& encoder, std::uint64_t seed) {
  if (config.kind == WorkerKind::kTabular) return Worker(TabularWorker(config.tabular));
  return Worker(SilWorker(config.sil, encoder, seed));
}

}  // namespace ihrl
