#include "ihrl/hrl_agent.hpp"

#include <cmath>

#include "ihrl/errors.hpp"

namespace ihrl {

namespace {

enum Stream : std::uint64_t { kEnvStream = 1, kAgentStream = 2, kGraphStream = 3, kRegistryStream = 4 };

double stddev(const std::vector<double>& xs, double mean) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / double(xs.size()));
}

}  // namespace

HrlAgent::HrlAgent(HrlConfig config, int width, int height, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      f_(config_.compression, width, height),
      graph_(config_.worker, ObservationEncoder{width, height, false}, derive_seed(seed, kGraphStream)),
      manager_(config_.manager),
      registry_(config_.worker, ObservationEncoder{width, height, true}, derive_seed(seed, kRegistryStream)),
      tracker_(config_.controllability_horizon),
      env_rng_(derive_seed(seed, kEnvStream)),
      agent_rng_(derive_seed(seed, kAgentStream)) {}

std::vector<OptionKey> HrlAgent::admissible_options(const ManagerState& s) const {
  std::vector<OptionKey> out;
  if (graph_.has_region(s.region))
    for (RegionId z2 : graph_.neighbors(s.region)) out.push_back(OptionKey::navigate(s.region, z2));
  for (const auto& k : registry_.options(s.region, s.task)) out.push_back(k);
  out.push_back(OptionKey::explore(s.region));
  return out;
}

Worker* HrlAgent::worker_for(const OptionKey& key) {
  switch (key.kind) {
    case OptionKind::kNavigate: return &graph_.worker({key.region, key.target});
    case OptionKind::kTask: return &registry_.worker(key);
    case OptionKind::kExplore: return nullptr;
  }
  return nullptr;
}

const Worker* HrlAgent::worker_for(const OptionKey& key) const {
  return const_cast<HrlAgent*>(this)->worker_for(key);
}

void HrlAgent::start_episode(const GridEnv& env) {
  const GridState s = env.reset();
  graph_.add_region(f_(s));
  registry_.register_state(s.inventory);
  current_ = s;
}

void HrlAgent::apply_credits(std::vector<MaturedCredit> matured) {
  for (auto& m : matured) {
    graph_.worker({m.key.region, m.key.target}).credit(m.credit, m.rho);
    if (credit_sink_) credit_sink_({steps_, m.key, m.successes, m.window, m.rho});
  }
}

void HrlAgent::end_episode() {
  apply_credits(tracker_.flush());
  current_.reset();
  ++episodes_;
}

void HrlAgent::train(const GridEnv& env, long until_steps) {
  if (env.width() != f_.width() || env.height() != f_.height())
    throw UsageError("environment size differs from the agent's compression grid");
  while (steps_ < until_steps) {
    if (!current_) start_episode(env);
    const GridState s = *current_;
    const ManagerState ms{f_(s), s.inventory};
    const std::vector<OptionKey> admissible = admissible_options(ms);
    const OptionKey o = manager_.get_option(ms, admissible, manager_.epsilon(steps_ - task_start_), agent_rng_);

    RunOptionParams params;
    params.gamma = config_.gamma;
    params.defer_success_credit = config_.controllability && o.kind == OptionKind::kNavigate;
    OptionOutcome out = run_option(s, OptionSpec::for_key(o), env, f_, worker_for(o), env_rng_, agent_rng_, params,
                                   config_.rewards);
    steps_ += out.duration;

    const GridState& s2 = out.final_state;
    const RegionId z2 = f_(s2);
    if (s2.alive && z2 != ms.region) graph_.observe_transition(ms.region, z2);
    if (s2.inventory != s.inventory) {
      if (s2.alive && z2 == ms.region)
        registry_.observe_task_change(ms.region, s.inventory, s2.inventory);
      else
        registry_.register_state(s2.inventory);
    }
    if (o.kind == OptionKind::kNavigate) {
      graph_.record_option_outcome({o.region, o.target}, out.success);
      if (config_.relabel && out.cause == TerminationCause::kWrongNeighbor && graph_.has_edge({o.region, z2})) {
        std::vector<WorkerStep> relabeled = out.worker_steps;
        relabeled.back().reward = config_.rewards.success;
        graph_.worker({o.region, z2}).learn_offline(relabeled);
      }
    }

    const bool episode_over = env.is_terminal(s2);
    // Budget truncation is not a terminal state of the task SMDP.
    const bool terminal = !s2.alive || env.objective_reached(s2.inventory);
    const ManagerState next{z2, s2.inventory};
    manager_.update(ms, o, out.discounted_reward, out.duration, next, admissible_options(next), terminal);

    if (config_.controllability) {
      apply_credits(tracker_.record_completion(out.success));
      if (out.success && out.deferred) tracker_.add_pending(o, std::move(*out.deferred));
    }
    if (option_sink_)
      option_sink_({episodes_, steps_, o, out.cause, out.success, out.duration, out.final_option_reward,
                    out.total_reward});

    if (episode_over)
      end_episode();
    else
      current_ = s2;
  }
}

EvalResult HrlAgent::evaluate(const GridEnv& env, int episodes, std::uint64_t seed) const {
  Rng env_rng(derive_seed(seed, kEnvStream));
  Rng agent_rng(derive_seed(seed, kAgentStream));
  EvalResult r;
  r.episodes = episodes;
  std::vector<double> returns;
  double successes = 0.0, length = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    GridState s = env.reset();
    double ret = 0.0;
    while (!env.is_terminal(s)) {
      const ManagerState ms{f_(s), s.inventory};
      // Unknown regions only offer a throwaway exploration option.
      const OptionKey o = graph_.has_region(ms.region)
                              ? [&] {
                                  const auto adm = admissible_options(ms);
                                  return manager_.get_option(ms, adm, 0.0, agent_rng);
                                }()
                              : OptionKey::explore(ms.region);
      const OptionOutcome out = run_option_frozen(s, OptionSpec::for_key(o), env, f_, worker_for(o), env_rng,
                                                  agent_rng, true, config_.gamma, config_.rewards);
      ret += out.total_reward;
      if (out.final_state.alive && f_(out.final_state) != ms.region) ++r.region_transitions;
      s = out.final_state;
    }
    if (!s.alive) ++r.deaths;
    if (s.alive && env.objective_reached(s.inventory)) successes += 1.0;
    length += s.t;
    returns.push_back(ret);
  }
  if (episodes > 0) {
    double sum = 0.0;
    for (double x : returns) sum += x;
    r.mean_return = sum / episodes;
    r.std_return = stddev(returns, r.mean_return);
    r.success_rate = successes / episodes;
    r.mean_length = length / episodes;
  }
  return r;
}

void HrlAgent::reset_for_transfer() {
  manager_.clear();
  registry_.clear();
}

void HrlAgent::begin_task(long task_budget) {
  if (current_) end_episode();
  reset_for_transfer();
  manager_.config().decay_steps = task_budget;
  task_start_ = steps_;
}

AgentDiagnostics HrlAgent::diagnostics() const {
  return {long(graph_.regions().size()), long(graph_.num_options() + registry_.num_options()),
          graph_.mean_edge_success(), episodes_};
}

}  // namespace ihrl
