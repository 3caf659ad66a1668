#pragma once

#include <vector>

#include "ihrl/env.hpp"

namespace ihrl {

/// What a worker sees of the state: position plus task flags.
struct WorkerObs {
  int x = 0;
  int y = 0;
  Inventory inventory = 0;

  Cell cell() const { return {x, y}; }
  static WorkerObs from(const GridState& s) { return {s.x, s.y, s.inventory}; }
  bool operator==(const WorkerObs&) const = default;
};

/// One option-MDP transition. `terminal` marks exits into the neighbor
/// super-states (and deaths/timeouts); the destination coordinates of a
/// terminal step are never bootstrapped from.
struct WorkerStep {
  WorkerObs obs;
  int action = 0;
  double reward = 0.0;
  WorkerObs next_obs;
  bool terminal = false;
  bool truncated = false;
};

/// Final transition (and the trajectory it closes) held back until the
/// controllability window matures.
struct DeferredCredit {
  std::vector<WorkerStep> trajectory;
};

/// Feature encoding: position normalized to [0,1]^2, optionally followed by a
/// one-hot of the three task flags.
struct ObservationEncoder {
  int width = 1;
  int height = 1;
  bool with_inventory = false;

  int dim() const { return with_inventory ? 5 : 2; }
  template <typename Out>
  void encode(const WorkerObs& obs, Out* out) const {
    out[0] = static_cast<Out>(width > 1 ? double(obs.x) / (width - 1) : 0.0);
    out[1] = static_cast<Out>(height > 1 ? double(obs.y) / (height - 1) : 0.0);
    if (with_inventory) {
      out[2] = static_cast<Out>((obs.inventory & kHasKey) ? 1.0 : 0.0);
      out[3] = static_cast<Out>((obs.inventory & kDoorOpen) ? 1.0 : 0.0);
      out[4] = static_cast<Out>((obs.inventory & kHasTreasure) ? 1.0 : 0.0);
    }
  }
  bool operator==(const ObservationEncoder&) const = default;
};

}  // namespace ihrl
