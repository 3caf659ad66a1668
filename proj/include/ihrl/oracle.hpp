#pragma once

#include <optional>
#include <vector>

#include "ihrl/env.hpp"

namespace ihrl {

/// Breadth-first search over the noise-free task dynamics. Distances are
/// measured to the nearest state whose inventory satisfies the objective.
class BfsPlanner {
 public:
  explicit BfsPlanner(const GridEnv& env);

  /// Steps-to-objective, or nullopt when unreachable.
  std::optional<int> distance(const GridState& state) const;
  /// Action that reduces the distance by one (lowest action id on ties).
  int best_action(const GridState& state) const;
  /// Full noise-free action sequence from the initial state.
  std::optional<std::vector<int>> plan() const;

 private:
  std::size_t index(int x, int y, Inventory inv) const;

  const GridEnv* env_;
  std::vector<int> dist_;  // -1 = unreachable
};

/// Solvable iff the objective is reachable from reset() on the noise-free dynamics.
bool is_solvable(const GridEnv& env);

/// True when the shortest noise-free solution picks up the key and opens the
/// door, i.e. no object can be skipped on the way to the objective.
bool requires_all_objects(const GridEnv& env);

}  // namespace ihrl
