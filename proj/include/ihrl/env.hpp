#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ihrl/random.hpp"

namespace ihrl {

// Primitive actions. Object interaction happens on cell entry, so there is no
// separate pickup/open action.
enum class Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumActions = 4;

// Task-state flags. The inventory is the task part of the state; position is
// the invariant part.
using Inventory = std::uint8_t;
inline constexpr Inventory kHasKey = 1;
inline constexpr Inventory kDoorOpen = 2;
inline constexpr Inventory kHasTreasure = 4;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct GridState {
  int x = 0;
  int y = 0;
  Inventory inventory = 0;
  bool alive = true;
  int t = 0;

  Cell cell() const { return {x, y}; }
  bool operator==(const GridState&) const = default;
};

struct Transition {
  GridState state;
  int action = 0;           // commanded
  int executed_action = 0;  // after action noise
  double reward = 0.0;
  GridState next_state;
  bool terminal = false;
  bool truncated = false;   // terminal only because the episode budget ran out
};

enum class LayoutId { kKdt1, kKdt2, kHazard, kGenerated };
enum class RewardMode { kAllObjects, kTerminalOnly };
// Which object event ends the episode.
enum class Objective { kTreasure, kDoor, kKey };

std::string to_string(LayoutId id);
std::string to_string(RewardMode mode);
std::string to_string(Objective objective);
LayoutId layout_from_string(std::string_view s);
RewardMode reward_mode_from_string(std::string_view s);
Objective objective_from_string(std::string_view s);

struct EnvConfig {
  LayoutId layout = LayoutId::kKdt1;
  // Map the generated task was derived from (only used when layout == kGenerated).
  LayoutId base_layout = LayoutId::kKdt1;
  // Optional ASCII map file; overrides the built-in map of `layout`/`base_layout`.
  std::string layout_path;
  double action_noise = 0.2;
  int budget = 300;
  RewardMode reward_mode = RewardMode::kAllObjects;
  Objective objective = Objective::kTreasure;
  // Object positions; unset entries fall back to the map's own markers.
  std::optional<Cell> key;
  std::optional<Cell> door;
  std::optional<Cell> treasure;
  std::uint64_t seed = 0;

  bool operator==(const EnvConfig&) const = default;
};

/// Defaults per layout: Key-door-treasure 300 steps, hazard 500 steps, treasure vs key objective.
EnvConfig default_config(LayoutId layout);

enum class Terrain : std::uint8_t { kFloor, kWall, kFatal };

/// Parsed ASCII grid. '#' wall, '.' floor, 'X' fatal, 'S' start, 'K'/'D'/'T' objects
/// (all three object markers sit on floor cells).
struct GridMap {
  int width = 0;
  int height = 0;
  std::vector<Terrain> terrain;
  Cell start;
  std::optional<Cell> key;
  std::optional<Cell> door;
  std::optional<Cell> treasure;

  static GridMap parse(std::string_view text);
  static GridMap load(const std::string& path);

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  Terrain at(Cell c) const { return terrain[static_cast<std::size_t>(c.y * width + c.x)]; }
  bool passable(Cell c) const { return in_bounds(c) && at(c) != Terrain::kWall; }
  bool floor(Cell c) const { return in_bounds(c) && at(c) == Terrain::kFloor; }
  /// Floor cell squeezed between two walls on opposite sides.
  bool is_doorway(Cell c) const;
  std::string render(const std::optional<GridState>& agent = std::nullopt) const;
};

/// Built-in map text for kdt1/kdt2/hazard.
std::string_view builtin_layout_text(LayoutId id);

/// One grid-world task. Stateless with respect to the agent: all episode state
/// lives in GridState, so stepping never mutates the environment.
class GridEnv {
 public:
  explicit GridEnv(EnvConfig config);

  const EnvConfig& config() const { return config_; }
  const GridMap& map() const { return map_; }
  int width() const { return map_.width; }
  int height() const { return map_.height; }
  Cell key() const { return key_; }
  Cell door() const { return door_; }
  Cell treasure() const { return treasure_; }

  GridState reset() const;
  Transition step(const GridState& state, int action, Rng& rng) const;
  bool is_terminal(const GridState& state) const;
  bool objective_reached(Inventory inventory) const;
  Inventory objective_flag() const;

  /// Deterministic movement ignoring noise, objects and doors. This is the
  /// invariant kernel shared by every task on the same map.
  Cell invariant_move(Cell from, int action) const;
  /// Deterministic task dynamics without noise (doors, pickups, fatal cells).
  GridState deterministic_step(const GridState& state, int action) const;

 private:
  Transition apply(const GridState& state, int action, int executed) const;

  EnvConfig config_;
  GridMap map_;
  Cell key_;
  Cell door_;
  Cell treasure_;
};

/// Cell delta for an action.
Cell action_delta(int action);

GridState reset(const EnvConfig& config, std::uint64_t seed);

/// Resamples key, door and treasure on the base layout. kdt1 keeps the key in
/// the room the door opens from; kdt2 puts it in a different room. The door
/// always sits on a doorway that separates the start from the treasure.
EnvConfig generate_task(LayoutId base_layout, std::uint64_t seed);
/// Reflects object x coordinates about the vertical midline.
EnvConfig mirror_task(const EnvConfig& config);

/// Room index per cell (-1 for walls, doorways and fatal cells).
std::vector<int> label_rooms(const GridMap& map, int* num_rooms = nullptr);

}  // namespace ihrl
