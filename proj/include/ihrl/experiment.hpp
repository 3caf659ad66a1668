#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ihrl/agent.hpp"
#include "ihrl/csv.hpp"
#include "ihrl/flat_agent.hpp"
#include "ihrl/hrl_agent.hpp"

namespace ihrl {

enum class ExperimentId { kExplorationKdt1, kExplorationKdt2, kTransfer, kControllability };

std::string to_string(ExperimentId id);
ExperimentId experiment_from_string(std::string_view s);

inline constexpr const char* kCsvSchemaVersion = "1";

struct RunConfig {
  ExperimentId experiment = ExperimentId::kExplorationKdt1;
  std::vector<std::string> agents{"HRL-SIL", "SIL", "SIL-EXP"};
  // Exploration runs once per reward mode; transfer and controllability use
  // all-objects reward.
  std::vector<RewardMode> reward_modes{RewardMode::kAllObjects, RewardMode::kTerminalOnly};
  long steps = 100000;  // per task
  long eval_interval = 2000;
  int eval_episodes = 20;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  double action_noise = 0.2;
  std::optional<int> episode_budget;
  std::optional<CompressionSpec> compression;
  std::string layout_path;  // replaces the experiment's built-in map

  WorkerKind hrl_worker = WorkerKind::kTabular;  // worker of the plain "HRL"/"HRL-CO" labels
  WorkerConfig worker;                           // hyperparameters shared by all HRL workers
  int hrl_sil_updates = 2;
  FlatConfig flat;
  ManagerConfig manager;
  int controllability_horizon = 10;
  bool relabel = false;

  std::string output_dir;  // empty: nothing written
  bool option_log = false;
  bool save_snapshots = false;  // write each trained HRL agent as a JSON snapshot
  int jobs = 1;
};

/// One evaluation point of one run.
struct EvalRow {
  int task = 0;
  long task_steps = 0;  // nominal step count within the task
  long env_steps = 0;   // actual cumulative primitive steps
  long episodes = 0;
  EvalResult eval;
  AgentDiagnostics diag;
};

struct RunLog {
  std::string experiment;  // including the reward-mode suffix
  std::string agent;
  std::uint64_t seed = 0;
  std::vector<EvalRow> rows;
  std::vector<std::pair<Edge, EdgeStats>> edges;  // final per-edge statistics (HRL only)
  std::string option_events;                       // CSV text when option_log is set
  std::string snapshot;                            // serialized HRL agent when save_snapshots is set
};

struct ExperimentResult {
  std::vector<RunLog> runs;
};

/// The tasks of an experiment for one seed (three for transfer, one otherwise).
std::vector<EnvConfig> experiment_tasks(const RunConfig& config, RewardMode mode, std::uint64_t seed);

std::unique_ptr<Agent> make_agent(const RunConfig& config, const std::string& label, int width, int height,
                                  std::uint64_t seed);

/// Throws ConfigError for unknown labels or labels that do not fit the experiment.
void validate(const RunConfig& config);

RunLog run_single(const RunConfig& config, RewardMode mode, const std::string& agent, std::uint64_t seed);
ExperimentResult run_experiment(const RunConfig& config);

CsvTable run_table(const RunLog& log);
CsvTable edges_table(const RunLog& log);

/// Mean and std across seeds per (experiment, agent, task, task_steps).
/// Runs with different step grids are resampled onto the coarsest grid
/// (last value at or before each point) and `warn` is called.
CsvTable aggregate(const std::vector<CsvTable>& runs, const std::function<void(const std::string&)>& warn = {});

/// Mean of a field over the last `n` rows of one task.
double final_value(const RunLog& log, int task, const std::function<double(const EvalRow&)>& field, int n = 5);
/// Area under the learning curve of one task: each eval value held over the
/// interval that ends at its step.
double curve_area(const RunLog& log, int task, const std::function<double(const EvalRow&)>& field);
/// First task_steps at which `field` reaches `level`, or nullopt.
std::optional<long> steps_to_reach(const RunLog& log, int task, const std::function<double(const EvalRow&)>& field,
                                   double level);

}  // namespace ihrl
