#include "ihrl/flat_agent.hpp"

#include <cmath>
#include <vector>

#include "ihrl/errors.hpp"

namespace ihrl {

double CountBonus::visit(const WorkerObs& s) {
  const long n = ++counts_[{s.x, s.y, int(s.inventory)}];
  return beta_ / std::sqrt(double(n));
}

long CountBonus::count(const WorkerObs& s) const {
  auto it = counts_.find({s.x, s.y, int(s.inventory)});
  return it == counts_.end() ? 0 : it->second;
}

FlatAgent::FlatAgent(FlatConfig config, int width, int height, std::uint64_t seed)
    : config_(std::move(config)),
      worker_(config_.sil, ObservationEncoder{width, height, true}, derive_seed(seed, 3)),
      bonus_(config_.beta),
      env_rng_(derive_seed(seed, 1)),
      agent_rng_(derive_seed(seed, 2)) {}

void FlatAgent::train(const GridEnv& env, long until_steps) {
  while (steps_ < until_steps) {
    if (!current_) current_ = env.reset();
    const GridState s = *current_;
    const WorkerObs obs = WorkerObs::from(s);
    const int a = worker_.act(obs, false, agent_rng_);
    const Transition tr = env.step(s, a, env_rng_);
    ++steps_;
    const double bonus = config_.count_bonus ? bonus_.visit(obs) : 0.0;
    const bool terminal = tr.terminal && !tr.truncated;
    worker_.observe({obs, a, tr.reward + bonus, WorkerObs::from(tr.next_state), terminal, tr.truncated}, false);
    if (tr.terminal) {
      worker_.end_episode(false);
      current_.reset();
      ++episodes_;
    } else {
      current_ = tr.next_state;
    }
  }
}

EvalResult FlatAgent::evaluate(const GridEnv& env, int episodes, std::uint64_t seed) const {
  Rng env_rng(derive_seed(seed, 1));
  Rng agent_rng(derive_seed(seed, 2));
  EvalResult r;
  r.episodes = episodes;
  std::vector<double> returns;
  double successes = 0.0, length = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    GridState s = env.reset();
    double ret = 0.0;
    while (!env.is_terminal(s)) {
      const Transition tr = env.step(s, worker_.act(WorkerObs::from(s), true, agent_rng), env_rng);
      ret += tr.reward;
      s = tr.next_state;
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
    double acc = 0.0;
    for (double x : returns) acc += (x - r.mean_return) * (x - r.mean_return);
    r.std_return = std::sqrt(acc / episodes);
    r.success_rate = successes / episodes;
    r.mean_length = length / episodes;
  }
  return r;
}

void FlatAgent::begin_task(long /*task_budget*/) {
  if (current_) {
    worker_.end_episode(false);
    current_.reset();
  }
  worker_.clear_replay();
  bonus_.clear();
}

}  // namespace ihrl
