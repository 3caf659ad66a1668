#include "ihrl/oracle.hpp"

#include <deque>

#include "ihrl/errors.hpp"

namespace ihrl {

namespace {
constexpr int kInventories = 8;
}

BfsPlanner::BfsPlanner(const GridEnv& env)
    : env_(&env), dist_(static_cast<std::size_t>(env.width() * env.height() * kInventories), -1) {
  // Forward-reachable state set first, then backwards BFS from goal states
  // along reversed edges.
  const int n = static_cast<int>(dist_.size());
  std::vector<std::vector<int>> predecessors(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<GridState> frontier;
  const GridState start = env.reset();
  seen[index(start.x, start.y, start.inventory)] = true;
  frontier.push_back(start);
  std::vector<std::size_t> goals;
  while (!frontier.empty()) {
    GridState s = frontier.front();
    frontier.pop_front();
    const std::size_t si = index(s.x, s.y, s.inventory);
    if (env.objective_reached(s.inventory)) {
      goals.push_back(si);
      continue;
    }
    if (!s.alive) continue;
    s.t = 0;
    for (int a = 0; a < kNumActions; ++a) {
      GridState next = env.deterministic_step(s, a);
      if (!next.alive) continue;
      const std::size_t ni = index(next.x, next.y, next.inventory);
      predecessors[ni].push_back(static_cast<int>(si));
      if (!seen[ni]) {
        seen[ni] = true;
        next.t = 0;
        frontier.push_back(next);
      }
    }
  }
  std::deque<std::size_t> queue;
  for (std::size_t g : goals) {
    dist_[g] = 0;
    queue.push_back(g);
  }
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    for (int p : predecessors[cur]) {
      auto& d = dist_[static_cast<std::size_t>(p)];
      if (d >= 0) continue;
      d = dist_[cur] + 1;
      queue.push_back(static_cast<std::size_t>(p));
    }
  }
}

std::size_t BfsPlanner::index(int x, int y, Inventory inv) const {
  return static_cast<std::size_t>((inv * env_->height() + y) * env_->width() + x);
}

std::optional<int> BfsPlanner::distance(const GridState& state) const {
  const int d = dist_[index(state.x, state.y, state.inventory)];
  if (d < 0) return std::nullopt;
  return d;
}

int BfsPlanner::best_action(const GridState& state) const {
  int best = 0;
  int best_d = -1;
  for (int a = 0; a < kNumActions; ++a) {
    const GridState next = env_->deterministic_step(state, a);
    if (!next.alive) continue;
    const int d = dist_[index(next.x, next.y, next.inventory)];
    if (d < 0) continue;
    if (best_d < 0 || d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

std::optional<std::vector<int>> BfsPlanner::plan() const {
  GridState s = env_->reset();
  if (!distance(s)) return std::nullopt;
  std::vector<int> actions;
  while (!env_->objective_reached(s.inventory)) {
    const int a = best_action(s);
    actions.push_back(a);
    s = env_->deterministic_step(s, a);
    s.t = 0;
  }
  return actions;
}

bool is_solvable(const GridEnv& env) { return BfsPlanner(env).distance(env.reset()).has_value(); }

bool requires_all_objects(const GridEnv& env) {
  const BfsPlanner planner(env);
  const auto actions = planner.plan();
  if (!actions) return false;
  GridState s = env.reset();
  for (int a : *actions) s = env.deterministic_step(s, a);
  Inventory needed = kHasKey;
  if (env.door().x >= 0) needed = static_cast<Inventory>(needed | kDoorOpen);
  return (s.inventory & needed) == needed;
}

}  // namespace ihrl
