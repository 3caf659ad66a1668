// ihrl: run experiments, evaluate snapshots, aggregate logs, dump region graphs.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ihrl/errors.hpp"
#include "ihrl/experiment.hpp"
#include "ihrl/persistence.hpp"

using namespace ihrl;

namespace {

std::string default_output_root() {
  const char* env = std::getenv("IHRL_OUTPUT_ROOT");
  return env && *env ? env : "results";
}

struct RunFlags {
  std::string experiment = "exploration-kdt1";
  std::vector<std::string> agents;
  std::vector<std::string> reward_modes;
  std::string hrl_worker = "tabular";
  std::string optimizer = "sgd";
  double lr = 7e-4;
  int cell_width = 0, cell_height = 0, origin_x = 0, origin_y = 0;
  int budget = 0;
};

void add_run(CLI::App& app, RunConfig& cfg, RunFlags& flags) {
  auto* run = app.add_subcommand("run", "Train agents and write per-seed and aggregate CSV logs");
  run->add_option("-e,--experiment", flags.experiment, "exploration-kdt1 | exploration-kdt2 | transfer | controllability")
      ->capture_default_str();
  run->add_option("-a,--agents", flags.agents, "Agent labels (HRL-SIL, HRL-TAB, HRL, HRL-CO, SIL, SIL-EXP, NO-TRANSFER-*)");
  run->add_option("--reward-modes", flags.reward_modes, "all-objects and/or terminal-only (exploration only)");
  run->add_option("--steps", cfg.steps, "Primitive environment steps per task")->capture_default_str();
  run->add_option("--eval-interval", cfg.eval_interval)->capture_default_str();
  run->add_option("--eval-episodes", cfg.eval_episodes)->capture_default_str();
  run->add_option("--seeds", cfg.seeds)->capture_default_str();
  run->add_option("--noise", cfg.action_noise, "Random-action probability")->capture_default_str();
  run->add_option("--budget", flags.budget, "Episode step budget (0: layout default)");
  run->add_option("--cell-width", flags.cell_width, "Region width (0: layout default)");
  run->add_option("--cell-height", flags.cell_height, "Region height (0: layout default)");
  run->add_option("--origin-x", flags.origin_x);
  run->add_option("--origin-y", flags.origin_y);
  run->add_option("--layout", cfg.layout_path, "ASCII map replacing the built-in layout");
  run->add_option("--hrl-worker", flags.hrl_worker, "Worker for HRL/HRL-CO: tabular | sil")->capture_default_str();
  run->add_option("--optimizer", flags.optimizer, "SIL optimizer: sgd | adam")->capture_default_str();
  run->add_option("--lr", flags.lr, "SIL learning rate")->capture_default_str();
  run->add_option("--sil-updates-hrl", cfg.hrl_sil_updates)->capture_default_str();
  run->add_option("--sil-updates-flat", cfg.flat.sil.sil_updates)->capture_default_str();
  run->add_option("--beta", cfg.flat.beta, "Count bonus scale for SIL-EXP")->capture_default_str();
  run->add_option("--worker-alpha", cfg.worker.tabular.alpha)->capture_default_str();
  run->add_option("--worker-epsilon", cfg.worker.tabular.epsilon)->capture_default_str();
  run->add_option("--worker-initial-q", cfg.worker.tabular.initial_q, "Initial tabular worker Q-value")
      ->capture_default_str();
  run->add_option("--manager-alpha", cfg.manager.alpha)->capture_default_str();
  run->add_option("--horizon", cfg.controllability_horizon, "Controllability window M")->capture_default_str();
  run->add_flag("--relabel", cfg.relabel, "Relabel wrong-neighbor exits for the matching option");
  run->add_option("-o,--output", cfg.output_dir, "Output root (default $IHRL_OUTPUT_ROOT or ./results)");
  run->add_flag("--option-log", cfg.option_log, "Write per-option event CSVs");
  run->add_flag("--save-snapshots", cfg.save_snapshots, "Write trained HRL agents as JSON snapshots");
  run->add_option("-j,--jobs", cfg.jobs, "Runs executed in parallel")->capture_default_str();
}

void finish_run_config(RunConfig& cfg, const RunFlags& flags) {
  cfg.experiment = experiment_from_string(flags.experiment);
  if (!flags.agents.empty()) {
    cfg.agents = flags.agents;
  } else if (cfg.experiment == ExperimentId::kTransfer) {
    cfg.agents = {"HRL-SIL", "NO-TRANSFER-HRL-SIL", "SIL-EXP", "NO-TRANSFER-SIL-EXP"};
  } else if (cfg.experiment == ExperimentId::kControllability) {
    cfg.agents = {"HRL-CO", "HRL"};
  }
  if (!flags.reward_modes.empty()) {
    cfg.reward_modes.clear();
    for (const auto& m : flags.reward_modes) cfg.reward_modes.push_back(reward_mode_from_string(m));
  }
  cfg.hrl_worker = worker_kind_from_string(flags.hrl_worker);
  cfg.worker.sil.optimizer = optimizer_from_string(flags.optimizer);
  cfg.worker.sil.lr = flags.lr;
  cfg.flat.sil.optimizer = cfg.worker.sil.optimizer;
  cfg.flat.sil.lr = flags.lr;
  if (flags.budget > 0) cfg.episode_budget = flags.budget;
  if (flags.cell_width > 0 || flags.cell_height > 0 || flags.origin_x || flags.origin_y) {
    CompressionSpec spec = default_compression(cfg.experiment == ExperimentId::kControllability ? LayoutId::kHazard
                                                                                                : LayoutId::kKdt1);
    if (flags.cell_width > 0) spec.cell_width = flags.cell_width;
    if (flags.cell_height > 0) spec.cell_height = flags.cell_height;
    spec.origin_x = flags.origin_x;
    spec.origin_y = flags.origin_y;
    cfg.compression = spec;
  }
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_root();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical RL over a compressed region graph"};
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.require_subcommand(1);

  RunConfig cfg;
  RunFlags flags;
  add_run(app, cfg, flags);

  std::string snapshot, layout = "kdt1", objective, reward_mode = "all-objects";
  int episodes = 20;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a saved HRL agent");
  eval->add_option("snapshot", snapshot, "Agent snapshot (JSON)")->required();
  eval->add_option("--layout", layout, "kdt1 | kdt2 | hazard")->capture_default_str();
  eval->add_option("--objective", objective, "treasure | door | key (default: layout default)");
  eval->add_option("--reward-mode", reward_mode)->capture_default_str();
  eval->add_option("--episodes", episodes)->capture_default_str();
  eval->add_option("--seed", eval_seed)->capture_default_str();

  std::vector<std::string> inputs;
  std::string aggregate_out;
  auto* agg = app.add_subcommand("aggregate", "Mean and std across per-seed run CSVs");
  agg->add_option("inputs", inputs, "Per-run CSV files")->required();
  agg->add_option("-o,--output", aggregate_out, "Output CSV (default: stdout)");

  std::string dot_out, manager_out;
  auto* dump = app.add_subcommand("dump-graph", "Write the region graph of a snapshot as DOT");
  dump->add_option("snapshot", snapshot, "Agent snapshot (JSON)")->required();
  dump->add_option("-o,--output", dot_out, "Output file (default: stdout)");
  dump->add_option("--manager-csv", manager_out, "Also write the manager Q-table as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      finish_run_config(cfg, flags);
      const auto result = run_experiment(cfg);
      for (const auto& run : result.runs) {
        const int last_task = run.rows.empty() ? 1 : run.rows.back().task;
        std::cout << run.experiment << ' ' << run.agent << " seed " << run.seed << ": final return "
                  << format_double(final_value(run, last_task, [](const EvalRow& r) { return r.eval.mean_return; }), 3)
                  << ", success "
                  << format_double(final_value(run, last_task, [](const EvalRow& r) { return r.eval.success_rate; }), 3)
                  << '\n';
      }
      std::cout << "logs written under " << cfg.output_dir << '\n';
    } else if (app.got_subcommand("eval")) {
      const HrlAgent agent = load_agent(snapshot);
      EnvConfig env_cfg = default_config(layout_from_string(layout));
      if (!objective.empty()) env_cfg.objective = objective_from_string(objective);
      env_cfg.reward_mode = reward_mode_from_string(reward_mode);
      const EvalResult r = agent.evaluate(GridEnv(env_cfg), episodes, eval_seed);
      std::cout << "episodes " << r.episodes << "\nsuccess_rate " << format_double(r.success_rate)
                << "\nmean_return " << format_double(r.mean_return) << "\nstd_return " << format_double(r.std_return)
                << "\ndeaths " << r.deaths << '\n';
    } else if (app.got_subcommand("aggregate")) {
      std::vector<CsvTable> tables;
      for (const auto& f : inputs) tables.push_back(read_csv(f));
      const CsvTable out = aggregate(tables, [](const std::string& w) { std::cerr << "warning: " << w << '\n'; });
      if (aggregate_out.empty())
        std::cout << out.text();
      else
        write_csv(out, aggregate_out);
    } else if (app.got_subcommand("dump-graph")) {
      const HrlAgent agent = load_agent(snapshot);
      const std::string dot = agent.graph().to_dot();
      if (dot_out.empty()) {
        std::cout << dot;
      } else {
        std::ofstream out(dot_out);
        if (!out || !(out << dot)) throw IoError("cannot write " + dot_out);
      }
      if (!manager_out.empty()) {
        std::ofstream out(manager_out);
        if (!out || !(out << agent.manager().to_csv())) throw IoError("cannot write " + manager_out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
