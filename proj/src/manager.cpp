#include "ihrl/manager.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ihrl/errors.hpp"
#include "ihrl/region_graph.hpp"

namespace ihrl {

namespace {

void check_admissible(const ManagerState& s, const OptionKey& o) {
  if (o.region != s.region)
    throw UsageError("option " + to_string(o) + " is not admissible in region " + std::to_string(s.region));
  if (o.kind == OptionKind::kTask && o.from != s.task)
    throw UsageError("task option " + to_string(o) + " starts from a different task state");
}

}  // namespace

double ManagerQ::q(const ManagerState& s, const OptionKey& o) const {
  auto it = q_.find({s, o});
  return it == q_.end() ? 0.0 : it->second;
}

double ManagerQ::max_q(const ManagerState& s, std::span<const OptionKey> admissible) const {
  if (admissible.empty()) return 0.0;
  double best = q(s, admissible.front());
  for (const auto& o : admissible.subspan(1)) best = std::max(best, q(s, o));
  return best;
}

OptionKey ManagerQ::get_option(const ManagerState& s, std::span<const OptionKey> admissible, double epsilon,
                               Rng& rng) const {
  if (admissible.empty()) throw UsageError("no admissible options in region " + std::to_string(s.region));
  for (const auto& o : admissible) check_admissible(s, o);
  if (admissible.size() == 1) return admissible.front();
  if (epsilon > 0 && uniform01(rng) < epsilon)
    return admissible[static_cast<std::size_t>(uniform_int(rng, 0, int(admissible.size()) - 1))];
  const double best = max_q(s, admissible);
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < admissible.size(); ++i)
    if (q(s, admissible[i]) == best) ties.push_back(i);
  return admissible[ties.size() == 1 ? ties[0] : ties[static_cast<std::size_t>(uniform_int(rng, 0, int(ties.size()) - 1))]];
}

double ManagerQ::update(const ManagerState& s, const OptionKey& o, double discounted_reward, int duration,
                        const ManagerState& next, std::span<const OptionKey> next_admissible, bool terminal) {
  check_admissible(s, o);
  if (duration < 1) throw UsageError("an option lasts at least one step");
  const double bootstrap = terminal ? 0.0 : std::pow(config_.gamma, duration) * max_q(next, next_admissible);
  double& v = q_[{s, o}];
  v += config_.alpha * (discounted_reward + bootstrap - v);
  return v;
}

double ManagerQ::epsilon(long step) const {
  if (config_.decay_steps <= 0) return config_.epsilon_end;
  const double frac = std::clamp(double(step) / double(config_.decay_steps), 0.0, 1.0);
  return config_.epsilon_start + frac * (config_.epsilon_end - config_.epsilon_start);
}

std::string ManagerQ::to_csv() const {
  std::ostringstream os;
  os << "region,task,option,value\n";
  char buf[64];
  for (const auto& [k, v] : q_) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << k.first.region << ',' << int(k.first.task) << ',' << to_string(k.second) << ',' << buf << '\n';
  }
  return os.str();
}

TaskStateRegistry::TaskStateRegistry(WorkerConfig worker_config, ObservationEncoder encoder, std::uint64_t seed)
    : worker_config_(std::move(worker_config)), encoder_(encoder), seed_(seed) {}

TaskStateRegistry::Discovery TaskStateRegistry::observe_task_change(RegionId z, Inventory s, Inventory s2) {
  if (s == s2) throw UsageError("a task-state change needs two distinct task states");
  Discovery d;
  d.new_state = register_state(s2);
  const OptionKey key = OptionKey::task(z, s, s2);
  if (!workers_.count(key)) {
    workers_.emplace(key, make_worker(worker_config_, encoder_, option_seed(seed_, key)));
    d.new_option = true;
  }
  return d;
}

std::vector<OptionKey> TaskStateRegistry::options(RegionId z, Inventory s) const {
  std::vector<OptionKey> out;
  for (auto it = workers_.lower_bound(OptionKey::task(z, s, 0));
       it != workers_.end() && it->first.region == z && it->first.from == s && it->first.kind == OptionKind::kTask; ++it)
    out.push_back(it->first);
  return out;
}

Worker& TaskStateRegistry::worker(const OptionKey& key) {
  auto it = workers_.find(key);
  if (it == workers_.end()) throw UsageError("unknown task option " + to_string(key));
  return it->second;
}

const Worker& TaskStateRegistry::worker(const OptionKey& key) const {
  auto it = workers_.find(key);
  if (it == workers_.end()) throw UsageError("unknown task option " + to_string(key));
  return it->second;
}

void TaskStateRegistry::clear() {
  states_.clear();
  workers_.clear();
}

void TaskStateRegistry::restore_option(const OptionKey& key, Worker worker) {
  if (key.kind != OptionKind::kTask) throw LoadError("registry entry is not a task option");
  workers_.insert_or_assign(key, std::move(worker));
}

}  // namespace ihrl
