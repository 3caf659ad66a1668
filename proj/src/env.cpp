#include "ihrl/env.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include "ihrl/errors.hpp"

namespace ihrl {

namespace {

#include "builtin_layouts.inc"

bool is_object_event_reward(RewardMode mode, Objective objective, Inventory flag) {
  if (mode == RewardMode::kAllObjects) return true;
  switch (objective) {
    case Objective::kTreasure: return flag == kHasTreasure;
    case Objective::kDoor: return flag == kDoorOpen;
    case Objective::kKey: return flag == kHasKey;
  }
  return false;
}

Cell require_object(const std::optional<Cell>& from_config, const std::optional<Cell>& from_map,
                    const char* name) {
  if (from_config) return *from_config;
  if (from_map) return *from_map;
  throw ConfigError(std::string("no position for object '") + name + "'");
}

}  // namespace

std::string to_string(LayoutId id) {
  switch (id) {
    case LayoutId::kKdt1: return "kdt1";
    case LayoutId::kKdt2: return "kdt2";
    case LayoutId::kHazard: return "hazard";
    case LayoutId::kGenerated: return "generated";
  }
  return "?";
}

std::string to_string(RewardMode mode) {
  return mode == RewardMode::kAllObjects ? "all-objects" : "terminal-only";
}

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::kTreasure: return "treasure";
    case Objective::kDoor: return "door";
    case Objective::kKey: return "key";
  }
  return "?";
}

LayoutId layout_from_string(std::string_view s) {
  if (s == "kdt1") return LayoutId::kKdt1;
  if (s == "kdt2") return LayoutId::kKdt2;
  if (s == "hazard") return LayoutId::kHazard;
  if (s == "generated") return LayoutId::kGenerated;
  throw ConfigError("unknown layout id '" + std::string(s) + "'");
}

RewardMode reward_mode_from_string(std::string_view s) {
  if (s == "all-objects") return RewardMode::kAllObjects;
  if (s == "terminal-only") return RewardMode::kTerminalOnly;
  throw ConfigError("unknown reward mode '" + std::string(s) + "'");
}

Objective objective_from_string(std::string_view s) {
  if (s == "treasure") return Objective::kTreasure;
  if (s == "door") return Objective::kDoor;
  if (s == "key") return Objective::kKey;
  throw ConfigError("unknown objective '" + std::string(s) + "'");
}

EnvConfig default_config(LayoutId layout) {
  EnvConfig config;
  config.layout = layout;
  config.base_layout = layout == LayoutId::kGenerated ? LayoutId::kKdt1 : layout;
  if (layout == LayoutId::kHazard) {
    config.budget = 500;
    config.objective = Objective::kKey;
  }
  return config;
}

std::string_view builtin_layout_text(LayoutId id) {
  switch (id) {
    case LayoutId::kKdt1: return kKdt1Layout;
    case LayoutId::kKdt2: return kKdt2Layout;
    case LayoutId::kHazard: return kHazardLayout;
    case LayoutId::kGenerated: break;
  }
  throw ConfigError("layout 'generated' has no map of its own");
}

GridMap GridMap::parse(std::string_view text) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("empty layout");

  GridMap map;
  map.height = static_cast<int>(rows.size());
  map.width = static_cast<int>(rows.front().size());
  map.terrain.resize(static_cast<std::size_t>(map.width * map.height), Terrain::kWall);
  bool has_start = false;
  for (int y = 0; y < map.height; ++y) {
    if (static_cast<int>(rows[y].size()) != map.width)
      throw ConfigError("layout row " + std::to_string(y) + " has inconsistent width");
    for (int x = 0; x < map.width; ++x) {
      Terrain terrain = Terrain::kFloor;
      switch (rows[y][x]) {
        case '#': terrain = Terrain::kWall; break;
        case '.': break;
        case 'X': terrain = Terrain::kFatal; break;
        case 'S': map.start = {x, y}; has_start = true; break;
        case 'K': map.key = Cell{x, y}; break;
        case 'D': map.door = Cell{x, y}; break;
        case 'T': map.treasure = Cell{x, y}; break;
        default:
          throw ConfigError(std::string("unknown layout symbol '") + rows[y][x] + "' at row " +
                            std::to_string(y));
      }
      map.terrain[static_cast<std::size_t>(y * map.width + x)] = terrain;
    }
  }
  if (!has_start) throw ConfigError("layout has no start cell 'S'");
  return map;
}

GridMap GridMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open layout file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool GridMap::is_doorway(Cell c) const {
  if (!floor(c)) return false;
  auto wall = [&](int x, int y) { return !in_bounds({x, y}) || at({x, y}) == Terrain::kWall; };
  return (wall(c.x - 1, c.y) && wall(c.x + 1, c.y)) || (wall(c.x, c.y - 1) && wall(c.x, c.y + 1));
}

std::string GridMap::render(const std::optional<GridState>& agent) const {
  std::string out;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      char ch = '.';
      switch (at({x, y})) {
        case Terrain::kWall: ch = '#'; break;
        case Terrain::kFatal: ch = 'X'; break;
        case Terrain::kFloor: break;
      }
      const Cell c{x, y};
      if (key && *key == c) ch = 'K';
      if (door && *door == c) ch = 'D';
      if (treasure && *treasure == c) ch = 'T';
      if (agent && agent->cell() == c) ch = '@';
      out += ch;
    }
    out += '\n';
  }
  return out;
}

Cell action_delta(int action) {
  switch (static_cast<Action>(action)) {
    case Action::kUp: return {0, -1};
    case Action::kDown: return {0, 1};
    case Action::kLeft: return {-1, 0};
    case Action::kRight: return {1, 0};
  }
  throw UsageError("invalid action id " + std::to_string(action));
}

GridEnv::GridEnv(EnvConfig config) : config_(std::move(config)) {
  if (!(config_.action_noise >= 0.0 && config_.action_noise <= 1.0))
    throw ConfigError("action noise must lie in [0,1]");
  if (config_.budget <= 0) throw ConfigError("episode budget must be positive");

  if (!config_.layout_path.empty()) {
    map_ = GridMap::load(config_.layout_path);
  } else {
    const LayoutId source =
        config_.layout == LayoutId::kGenerated ? config_.base_layout : config_.layout;
    if (source == LayoutId::kGenerated) throw ConfigError("generated task without a base layout");
    map_ = GridMap::parse(builtin_layout_text(source));
  }

  key_ = require_object(config_.key, map_.key, "key");
  // Hazard-style tasks only carry a key; door and treasure default to the key
  // cell's absence and are never reachable.
  if (config_.objective == Objective::kKey && !config_.door && !map_.door) {
    door_ = {-1, -1};
    treasure_ = {-1, -1};
  } else {
    door_ = require_object(config_.door, map_.door, "door");
    treasure_ = require_object(config_.treasure, map_.treasure, "treasure");
  }

  auto check = [&](Cell c, const char* name) {
    if (c.x < 0) return;
    if (!map_.floor(c))
      throw ConfigError(std::string("object '") + name + "' is not on a passable cell");
  };
  check(key_, "key");
  check(door_, "door");
  check(treasure_, "treasure");
  if (key_ == door_ || (treasure_.x >= 0 && (key_ == treasure_ || door_ == treasure_)))
    throw ConfigError("objects must occupy distinct cells");
  if (key_ == map_.start) throw ConfigError("key may not sit on the start cell");

  map_.key = key_;
  map_.door = door_.x >= 0 ? std::optional<Cell>(door_) : std::nullopt;
  map_.treasure = treasure_.x >= 0 ? std::optional<Cell>(treasure_) : std::nullopt;
}

GridState GridEnv::reset() const {
  GridState state;
  state.x = map_.start.x;
  state.y = map_.start.y;
  return state;
}

GridState reset(const EnvConfig& config, std::uint64_t /*seed*/) {
  // The start cell is fixed by the layout; the seed only feeds step noise.
  return GridEnv(config).reset();
}

Inventory GridEnv::objective_flag() const {
  switch (config_.objective) {
    case Objective::kTreasure: return kHasTreasure;
    case Objective::kDoor: return kDoorOpen;
    case Objective::kKey: return kHasKey;
  }
  return kHasTreasure;
}

bool GridEnv::objective_reached(Inventory inventory) const {
  return (inventory & objective_flag()) != 0;
}

bool GridEnv::is_terminal(const GridState& state) const {
  return !state.alive || objective_reached(state.inventory) || state.t >= config_.budget;
}

Cell GridEnv::invariant_move(Cell from, int action) const {
  const Cell d = action_delta(action);
  const Cell to{from.x + d.x, from.y + d.y};
  return map_.passable(to) ? to : from;
}

Transition GridEnv::apply(const GridState& state, int action, int executed) const {
  Transition tr;
  tr.state = state;
  tr.action = action;
  tr.executed_action = executed;

  GridState next = state;
  next.t = state.t + 1;
  const Cell d = action_delta(executed);
  const Cell target{state.x + d.x, state.y + d.y};
  bool blocked = !map_.passable(target);
  if (!blocked && target == door_ && !(state.inventory & kDoorOpen) && !(state.inventory & kHasKey))
    blocked = true;
  if (!blocked) {
    next.x = target.x;
    next.y = target.y;
  }

  double reward = 0.0;
  auto collect = [&](Inventory flag) {
    if (next.inventory & flag) return;
    next.inventory = static_cast<Inventory>(next.inventory | flag);
    if (is_object_event_reward(config_.reward_mode, config_.objective, flag)) reward += 1.0;
  };
  const Cell here = next.cell();
  if (map_.at(here) == Terrain::kFatal) {
    next.alive = false;
  } else {
    if (here == key_) collect(kHasKey);
    if (here == door_ && (next.inventory & kHasKey)) collect(kDoorOpen);
    if (here == treasure_ && config_.objective == Objective::kTreasure) collect(kHasTreasure);
  }

  tr.reward = reward;
  tr.next_state = next;
  const bool done = !next.alive || objective_reached(next.inventory);
  tr.terminal = done || next.t >= config_.budget;
  tr.truncated = !done && tr.terminal;
  return tr;
}

Transition GridEnv::step(const GridState& state, int action, Rng& rng) const {
  if (action < 0 || action >= kNumActions) throw UsageError("invalid action id");
  if (is_terminal(state)) throw UsageError("step called on a terminal state");
  int executed = action;
  if (uniform01(rng) < config_.action_noise) executed = uniform_int(rng, 0, kNumActions - 1);
  return apply(state, action, executed);
}

GridState GridEnv::deterministic_step(const GridState& state, int action) const {
  return apply(state, action, action).next_state;
}

std::vector<int> label_rooms(const GridMap& map, int* num_rooms) {
  std::vector<int> label(static_cast<std::size_t>(map.width * map.height), -1);
  int rooms = 0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const Cell c{x, y};
      if (!map.floor(c) || map.is_doorway(c) || label[static_cast<std::size_t>(y * map.width + x)] >= 0)
        continue;
      std::queue<Cell> frontier;
      frontier.push(c);
      label[static_cast<std::size_t>(y * map.width + x)] = rooms;
      while (!frontier.empty()) {
        const Cell cur = frontier.front();
        frontier.pop();
        for (int a = 0; a < kNumActions; ++a) {
          const Cell d = action_delta(a);
          const Cell n{cur.x + d.x, cur.y + d.y};
          if (!map.floor(n) || map.is_doorway(n)) continue;
          auto& l = label[static_cast<std::size_t>(n.y * map.width + n.x)];
          if (l >= 0) continue;
          l = rooms;
          frontier.push(n);
        }
      }
      ++rooms;
    }
  }
  if (num_rooms) *num_rooms = rooms;
  return label;
}

namespace {

// Cells reachable from `from` without entering `blocked`.
std::vector<bool> reachable_without(const GridMap& map, Cell from, Cell blocked) {
  std::vector<bool> seen(static_cast<std::size_t>(map.width * map.height), false);
  std::queue<Cell> frontier;
  frontier.push(from);
  seen[static_cast<std::size_t>(from.y * map.width + from.x)] = true;
  while (!frontier.empty()) {
    const Cell cur = frontier.front();
    frontier.pop();
    for (int a = 0; a < kNumActions; ++a) {
      const Cell d = action_delta(a);
      const Cell n{cur.x + d.x, cur.y + d.y};
      if (!map.floor(n) || n == blocked) continue;
      auto idx = static_cast<std::size_t>(n.y * map.width + n.x);
      if (seen[idx]) continue;
      seen[idx] = true;
      frontier.push(n);
    }
  }
  return seen;
}

}  // namespace

EnvConfig generate_task(LayoutId base_layout, std::uint64_t seed) {
  if (base_layout != LayoutId::kKdt1 && base_layout != LayoutId::kKdt2)
    throw GenerationError("task generation needs a Key-door-treasure base layout");
  const GridMap map = GridMap::parse(builtin_layout_text(base_layout));
  int num_rooms = 0;
  const std::vector<int> room = label_rooms(map, &num_rooms);
  auto room_of = [&](Cell c) { return room[static_cast<std::size_t>(c.y * map.width + c.x)]; };

  std::vector<Cell> doorways;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.is_doorway({x, y})) doorways.push_back({x, y});

  Rng rng(derive_seed(seed, 0x7A5C));
  std::shuffle(doorways.begin(), doorways.end(), rng);

  for (const Cell door : doorways) {
    const std::vector<bool> start_side = reachable_without(map, map.start, door);
    std::vector<int> start_rooms;
    std::vector<Cell> behind_cells;
    int door_room = -1;
    for (int y = 0; y < map.height; ++y) {
      for (int x = 0; x < map.width; ++x) {
        const Cell c{x, y};
        const int r = room_of(c);
        if (r < 0) continue;
        if (start_side[static_cast<std::size_t>(y * map.width + x)]) {
          if (std::find(start_rooms.begin(), start_rooms.end(), r) == start_rooms.end())
            start_rooms.push_back(r);
        } else {
          behind_cells.push_back(c);
        }
      }
    }
    if (behind_cells.empty()) continue;  // door is not a cut
    for (int a = 0; a < kNumActions; ++a) {
      const Cell d = action_delta(a);
      const Cell n{door.x + d.x, door.y + d.y};
      if (map.in_bounds(n) && room_of(n) >= 0 && start_side[static_cast<std::size_t>(n.y * map.width + n.x)])
        door_room = room_of(n);
    }
    if (door_room < 0) continue;

    std::vector<int> key_rooms;
    if (base_layout == LayoutId::kKdt1) {
      key_rooms.push_back(door_room);
    } else {
      for (int r : start_rooms)
        if (r != door_room) key_rooms.push_back(r);
    }
    if (key_rooms.empty()) continue;
    std::sort(key_rooms.begin(), key_rooms.end());
    const int key_room = key_rooms[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(key_rooms.size()) - 1))];

    std::vector<Cell> key_cells;
    for (int y = 0; y < map.height; ++y)
      for (int x = 0; x < map.width; ++x)
        if (room_of({x, y}) == key_room && !(Cell{x, y} == map.start)) key_cells.push_back({x, y});
    if (key_cells.empty()) continue;

    EnvConfig config = default_config(LayoutId::kGenerated);
    config.base_layout = base_layout;
    config.seed = seed;
    config.door = door;
    config.key = key_cells[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(key_cells.size()) - 1))];
    config.treasure = behind_cells[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(behind_cells.size()) - 1))];
    return config;
  }
  throw GenerationError("no doorway satisfies the " + to_string(base_layout) + " constraints");
}

EnvConfig mirror_task(const EnvConfig& config) {
  const GridEnv env(config);
  const int w = env.width();
  auto reflect = [w](Cell c) { return Cell{w - 1 - c.x, c.y}; };
  EnvConfig mirrored = config;
  if (mirrored.layout != LayoutId::kGenerated) {
    mirrored.base_layout = mirrored.layout;
    mirrored.layout = LayoutId::kGenerated;
  }
  mirrored.key = reflect(env.key());
  if (env.door().x >= 0) mirrored.door = reflect(env.door());
  if (env.treasure().x >= 0) mirrored.treasure = reflect(env.treasure());
  GridEnv validate(mirrored);  // throws if a reflected object lands on a wall
  (void)validate;
  return mirrored;
}

}  // namespace ihrl
