#include "ihrl/option_runtime.hpp"

#include <cstdio>
#include <sstream>

#include "ihrl/errors.hpp"

namespace ihrl {

std::string to_string(OptionKind kind) {
  switch (kind) {
    case OptionKind::kNavigate: return "navigate";
    case OptionKind::kExplore: return "explore";
    case OptionKind::kTask: return "task";
  }
  return "?";
}

std::string to_string(const OptionKey& key) {
  std::ostringstream os;
  switch (key.kind) {
    case OptionKind::kNavigate: os << "nav:" << key.region << '>' << key.target; break;
    case OptionKind::kExplore: os << "exp:" << key.region; break;
    case OptionKind::kTask:
      os << "task:" << key.region << ':' << int(key.from) << '>' << int(key.to);
      break;
  }
  return os.str();
}

OptionKey option_key_from_string(const std::string& s) {
  int a = 0, b = 0, c = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "nav:%d>%d%c", &a, &b, &tail) == 2) return OptionKey::navigate(a, b);
  if (std::sscanf(s.c_str(), "exp:%d%c", &a, &tail) == 1) return OptionKey::explore(a);
  if (std::sscanf(s.c_str(), "task:%d:%d>%d%c", &a, &b, &c, &tail) == 3 && b >= 0 && b < 8 && c >= 0 && c < 8)
    return OptionKey::task(a, Inventory(b), Inventory(c));
  throw LoadError("malformed option key '" + s + "'");
}

std::string to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::kReachedTarget: return "reached-target";
    case TerminationCause::kWrongNeighbor: return "wrong-neighbor";
    case TerminationCause::kTimeout: return "timeout";
    case TerminationCause::kTaskStateChange: return "task-state-change";
    case TerminationCause::kEnvTerminal: return "env-terminal";
  }
  return "?";
}

OptionStepResult classify_option_step(const OptionSpec& spec, const Transition& tr, const Compression& f,
                                      int steps, const OptionRewardConfig& rewards) {
  const OptionKey& key = spec.key;
  const bool explore = key.kind == OptionKind::kExplore;
  const RegionId z2 = f(tr.next_state);
  const bool task_changed = tr.next_state.inventory != tr.state.inventory;
  OptionStepResult r;
  auto fail = [&](TerminationCause cause) {
    r.ends = true;
    r.worker_terminal = true;
    r.cause = cause;
    r.reward = explore ? 0.0 : rewards.failure;
  };

  if (!tr.next_state.alive) {
    fail(TerminationCause::kEnvTerminal);
    return r;
  }
  const bool reached = (key.kind == OptionKind::kNavigate && z2 == key.target) ||
                       (key.kind == OptionKind::kTask && z2 == key.region && tr.next_state.inventory == key.to);
  if (reached) {
    r.ends = true;
    r.worker_terminal = true;
    r.success = true;
    r.cause = TerminationCause::kReachedTarget;
    r.reward = rewards.success;
    return r;
  }
  if (z2 != key.region || task_changed) {
    const bool objective = tr.terminal && !tr.truncated;
    fail(objective ? TerminationCause::kEnvTerminal
                   : (z2 != key.region ? TerminationCause::kWrongNeighbor : TerminationCause::kTaskStateChange));
    // an exploration option has done its job once the region or task state moved
    r.success = explore;
    return r;
  }
  if (tr.terminal) {
    r.ends = true;
    r.truncated = true;
    r.cause = TerminationCause::kEnvTerminal;
    return r;
  }
  if (spec.step_limit > 0 && steps >= spec.step_limit) fail(TerminationCause::kTimeout);
  return r;
}

OptionOutcome run_option(const GridState& start, const OptionSpec& spec, const GridEnv& env,
                         const Compression& f, Worker* worker, Rng& env_rng, Rng& agent_rng,
                         const RunOptionParams& params, const OptionRewardConfig& rewards) {
  if (f(start) != spec.key.region)
    throw UsageError("option " + to_string(spec.key) + " started outside its initiation region");
  if (env.is_terminal(start)) throw UsageError("option started from a terminal state");
  const bool explore = spec.key.kind == OptionKind::kExplore;
  if (!explore && worker == nullptr) throw UsageError("option " + to_string(spec.key) + " has no worker");

  OptionOutcome out;
  GridState s = start;
  double discount = 1.0;
  for (int steps = 1;; ++steps) {
    const WorkerObs obs = WorkerObs::from(s);
    const int a = explore ? exploration_policy(agent_rng) : worker->act(obs, params.greedy, agent_rng);
    const Transition tr = env.step(s, a, env_rng);
    const OptionStepResult r = classify_option_step(spec, tr, f, steps, rewards);
    out.discounted_reward += discount * tr.reward;
    out.total_reward += tr.reward;
    discount *= params.gamma;
    if (params.keep_trajectory) out.trajectory.push_back(tr);
    if (!explore) {
      WorkerStep ws{obs, a, r.reward, WorkerObs::from(tr.next_state), r.worker_terminal, r.truncated};
      out.worker_steps.push_back(ws);
      if (params.learn) worker->observe(ws, r.ends && r.success && params.defer_success_credit);
    }
    s = tr.next_state;
    if (r.ends) {
      out.final_state = s;
      out.cause = r.cause;
      out.success = r.success;
      out.duration = steps;
      out.final_option_reward = r.reward;
      break;
    }
  }
  if (!explore && params.learn) out.deferred = worker->end_episode(out.success && params.defer_success_credit);
  return out;
}

OptionOutcome run_option_frozen(const GridState& start, const OptionSpec& spec, const GridEnv& env,
                                const Compression& f, const Worker* worker, Rng& env_rng, Rng& agent_rng,
                                bool greedy, double gamma, const OptionRewardConfig& rewards) {
  RunOptionParams params;
  params.learn = false;
  params.greedy = greedy;
  params.gamma = gamma;
  // with learn == false run_option only calls the const act()
  return run_option(start, spec, env, f, const_cast<Worker*>(worker), env_rng, agent_rng, params, rewards);
}

ControllabilityTracker::ControllabilityTracker(int horizon) : horizon_(horizon) {
  if (horizon_ < 1) throw ConfigError("controllability horizon must be at least 1");
}

std::vector<MaturedCredit> ControllabilityTracker::record_completion(bool success) {
  std::vector<MaturedCredit> matured;
  std::vector<Pending> open;
  for (auto& p : pending_) {
    ++p.observed;
    if (success) ++p.successes;
    if (p.observed >= horizon_)
      matured.push_back({p.key, std::move(p.credit), p.successes, p.observed, double(p.successes) / horizon_});
    else
      open.push_back(std::move(p));
  }
  pending_ = std::move(open);
  return matured;
}

void ControllabilityTracker::add_pending(const OptionKey& key, DeferredCredit credit) {
  pending_.push_back({key, std::move(credit), 0, 0});
}

std::vector<MaturedCredit> ControllabilityTracker::flush() {
  std::vector<MaturedCredit> matured;
  for (auto& p : pending_) {
    const double rho = p.observed > 0 ? double(p.successes) / p.observed : 0.0;
    matured.push_back({p.key, std::move(p.credit), p.successes, p.observed, rho});
  }
  pending_.clear();
  return matured;
}

}  // namespace ihrl
