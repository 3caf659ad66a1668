#include "ihrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ihrl/errors.hpp"
#include "ihrl/oracle.hpp"
#include "ihrl/persistence.hpp"

namespace ihrl {

namespace {

const std::vector<std::string> kHrlLabels{"HRL-SIL", "HRL-TAB", "HRL", "HRL-CO"};
const std::vector<std::string> kFlatLabels{"SIL", "SIL-EXP"};
constexpr const char* kNoTransfer = "NO-TRANSFER-";

bool is_no_transfer(const std::string& label) { return label.rfind(kNoTransfer, 0) == 0; }
std::string base_label(const std::string& label) {
  return is_no_transfer(label) ? label.substr(std::string(kNoTransfer).size()) : label;
}
bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string experiment_dir_name(const RunConfig& c, RewardMode mode) {
  std::string name = to_string(c.experiment);
  if (c.experiment == ExperimentId::kExplorationKdt1 || c.experiment == ExperimentId::kExplorationKdt2)
    name += "-" + to_string(mode);
  return name;
}

std::vector<RewardMode> modes_for(const RunConfig& c) {
  if (c.experiment == ExperimentId::kExplorationKdt1 || c.experiment == ExperimentId::kExplorationKdt2)
    return c.reward_modes;
  return {RewardMode::kAllObjects};
}

EnvConfig base_env(const RunConfig& c, LayoutId layout, RewardMode mode) {
  EnvConfig e = default_config(layout);
  e.action_noise = c.action_noise;
  e.reward_mode = mode;
  if (c.episode_budget) e.budget = *c.episode_budget;
  e.layout_path = c.layout_path;
  return e;
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::kExplorationKdt1: return "exploration-kdt1";
    case ExperimentId::kExplorationKdt2: return "exploration-kdt2";
    case ExperimentId::kTransfer: return "transfer";
    case ExperimentId::kControllability: return "controllability";
  }
  return "?";
}

ExperimentId experiment_from_string(std::string_view s) {
  for (auto id : {ExperimentId::kExplorationKdt1, ExperimentId::kExplorationKdt2, ExperimentId::kTransfer,
                  ExperimentId::kControllability})
    if (s == to_string(id)) return id;
  throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

std::vector<EnvConfig> experiment_tasks(const RunConfig& c, RewardMode mode, std::uint64_t seed) {
  switch (c.experiment) {
    case ExperimentId::kExplorationKdt1: return {base_env(c, LayoutId::kKdt1, mode)};
    case ExperimentId::kExplorationKdt2: return {base_env(c, LayoutId::kKdt2, mode)};
    case ExperimentId::kControllability: return {base_env(c, LayoutId::kHazard, mode)};
    case ExperimentId::kTransfer: break;
  }
  // Task 1: key and door only. Task 2: a generated key-door-treasure task.
  // Task 3: task 2 with the objects mirrored.
  EnvConfig first = base_env(c, LayoutId::kKdt1, mode);
  first.objective = Objective::kDoor;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    EnvConfig second = generate_task(LayoutId::kKdt1, derive_seed(seed, 100 + k));
    second.action_noise = first.action_noise;
    second.budget = first.budget;
    second.reward_mode = mode;
    try {
      EnvConfig third = mirror_task(second);
      if (requires_all_objects(GridEnv(second)) && requires_all_objects(GridEnv(third)))
        return {first, second, third};
    } catch (const ConfigError&) {
      // reflected object landed on a wall; try the next candidate
    }
  }
  throw GenerationError("no generated task whose mirror image still needs every object");
}

void validate(const RunConfig& c) {
  if (c.steps <= 0) throw ConfigError("total steps must be positive");
  if (c.eval_interval <= 0) throw ConfigError("eval interval must be positive");
  if (c.eval_episodes < 0) throw ConfigError("eval episodes must be non-negative");
  if (c.seeds.empty()) throw ConfigError("at least one seed is required");
  if (c.agents.empty()) throw ConfigError("at least one agent is required");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (modes_for(c).empty()) throw ConfigError("at least one reward mode is required");
  for (const auto& label : c.agents) {
    const std::string base = base_label(label);
    if (!contains(kHrlLabels, base) && !contains(kFlatLabels, base))
      throw ConfigError("unknown agent '" + label + "'");
    if (is_no_transfer(label) && c.experiment != ExperimentId::kTransfer)
      throw ConfigError("agent '" + label + "' only exists in the transfer experiment");
  }
}

std::unique_ptr<Agent> make_agent(const RunConfig& c, const std::string& label, int width, int height,
                                  std::uint64_t seed) {
  const std::string base = base_label(label);
  if (contains(kFlatLabels, base)) {
    FlatConfig fc = c.flat;
    fc.count_bonus = base == "SIL-EXP";
    return std::make_unique<FlatAgent>(fc, width, height, seed);
  }
  if (!contains(kHrlLabels, base)) throw ConfigError("unknown agent '" + label + "'");
  HrlConfig hc;
  hc.worker = c.worker;
  hc.worker.kind = base == "HRL-SIL" ? WorkerKind::kSil : base == "HRL-TAB" ? WorkerKind::kTabular : c.hrl_worker;
  hc.worker.sil.sil_updates = c.hrl_sil_updates;
  hc.compression = c.compression ? *c.compression
                                 : default_compression(c.experiment == ExperimentId::kControllability
                                                           ? LayoutId::kHazard
                                                           : LayoutId::kKdt1);
  hc.manager = c.manager;
  hc.manager.decay_steps = c.steps;
  hc.controllability = base == "HRL-CO";
  hc.controllability_horizon = c.controllability_horizon;
  hc.relabel = c.relabel;
  return std::make_unique<HrlAgent>(hc, width, height, seed);
}

RunLog run_single(const RunConfig& c, RewardMode mode, const std::string& label, std::uint64_t seed) {
  const std::vector<EnvConfig> tasks = experiment_tasks(c, mode, seed);
  RunLog log;
  log.experiment = experiment_dir_name(c, mode);
  log.agent = label;
  log.seed = seed;

  std::ostringstream events;
  if (c.option_log) events << "episode,step,option,cause,success,duration,option_reward,task_reward,rho\n";
  auto attach_sinks = [&](Agent& agent) {
    auto* hrl = dynamic_cast<HrlAgent*>(&agent);
    if (!hrl || !c.option_log) return;
    hrl->set_option_sink([&events](const OptionEvent& e) {
      events << e.episode << ',' << e.step << ',' << to_string(e.option) << ',' << to_string(e.cause) << ','
             << (e.success ? 1 : 0) << ',' << e.duration << ',' << format_double(e.option_reward) << ','
             << format_double(e.task_reward) << ",\n";
    });
    hrl->set_credit_sink([&events](const CreditEvent& e) {
      events << ',' << e.step << ',' << to_string(e.option) << ",credit,," << e.window << ",,,"
             << format_double(e.rho) << '\n';
    });
  };

  std::unique_ptr<Agent> agent;
  long eval_index = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const GridEnv env(tasks[t]);
    if (!agent || is_no_transfer(label)) {
      agent = make_agent(c, label, env.width(), env.height(), derive_seed(seed, 10 + t));
      attach_sinks(*agent);
    }
    agent->begin_task(c.steps);
    const long start = agent->steps();
    for (long point = c.eval_interval; point <= c.steps; point += c.eval_interval) {
      agent->train(env, start + point);
      EvalRow row;
      row.task = int(t) + 1;
      row.task_steps = point;
      row.env_steps = agent->steps();
      row.diag = agent->diagnostics();
      row.episodes = row.diag.episodes;
      // the same evaluation seeds for every agent at a given point
      row.eval = agent->evaluate(env, c.eval_episodes, derive_seed(seed, 1000000 + std::uint64_t(eval_index++)));
      log.rows.push_back(row);
    }
  }
  if (auto* hrl = dynamic_cast<HrlAgent*>(agent.get())) {
    for (const Edge& e : hrl->graph().edges()) log.edges.emplace_back(e, hrl->graph().stats(e));
    if (c.save_snapshots) log.snapshot = serialize_agent(*hrl);
  }
  log.option_events = events.str();
  return log;
}

CsvTable run_table(const RunLog& log) {
  CsvTable t;
  t.header = {"experiment", "agent",    "seed",       "task",       "task_steps",   "env_steps",
              "episodes",   "mean_return", "std_return", "success_rate", "mean_length", "deaths",
              "region_transitions", "death_rate", "regions", "options", "edge_success"};
  for (const auto& r : log.rows) {
    const double death_rate =
        r.eval.region_transitions > 0 ? double(r.eval.deaths) / double(r.eval.region_transitions) : 0.0;
    t.rows.push_back({log.experiment, log.agent, std::to_string(log.seed), std::to_string(r.task),
                      std::to_string(r.task_steps), std::to_string(r.env_steps), std::to_string(r.episodes),
                      format_double(r.eval.mean_return), format_double(r.eval.std_return),
                      format_double(r.eval.success_rate), format_double(r.eval.mean_length),
                      std::to_string(r.eval.deaths), std::to_string(r.eval.region_transitions),
                      format_double(death_rate), std::to_string(r.diag.regions), std::to_string(r.diag.options),
                      format_double(r.diag.edge_success)});
  }
  return t;
}

CsvTable edges_table(const RunLog& log) {
  CsvTable t;
  t.header = {"from", "to", "attempts", "successes", "success_rate"};
  for (const auto& [e, s] : log.edges)
    t.rows.push_back({std::to_string(e.first), std::to_string(e.second), std::to_string(s.attempts),
                      std::to_string(s.successes), format_double(s.success_rate())});
  return t;
}

ExperimentResult run_experiment(const RunConfig& c) {
  validate(c);
  struct Job {
    RewardMode mode;
    std::string agent;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (RewardMode mode : modes_for(c))
    for (const auto& a : c.agents)
      for (auto s : c.seeds) jobs.push_back({mode, a, s});

  std::filesystem::path root(c.output_dir);
  if (!c.output_dir.empty()) {
    std::error_code ec;
    for (RewardMode mode : modes_for(c)) {
      std::filesystem::create_directories(root / experiment_dir_name(c, mode), ec);
      if (ec) throw IoError("cannot create output directory " + (root / experiment_dir_name(c, mode)).string() +
                            ": " + ec.message());
    }
  }

  ExperimentResult result;
  result.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        result.runs[i] = run_single(c, jobs[i].mode, jobs[i].agent, jobs[i].seed);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(c.jobs, int(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  if (!c.output_dir.empty()) {
    std::map<std::string, std::vector<CsvTable>> by_dir;
    for (const auto& run : result.runs) {
      const auto dir = root / run.experiment;
      const std::string stem = run.agent + "_seed" + std::to_string(run.seed);
      CsvTable table = run_table(run);
      write_csv(table, (dir / (stem + ".csv")).string());
      if (!run.edges.empty()) write_csv(edges_table(run), (dir / (stem + "_edges.csv")).string());
      if (!run.option_events.empty()) {
        std::ofstream out(dir / (stem + "_options.csv"), std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write option log in " + dir.string());
        out << run.option_events;
      }
      if (!run.snapshot.empty()) {
        std::ofstream out(dir / (stem + "_agent.json"), std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write snapshot in " + dir.string());
        out << run.snapshot;
      }
      by_dir[run.experiment].push_back(std::move(table));
    }
    for (const auto& [dir, tables] : by_dir) write_csv(aggregate(tables), (root / dir / "aggregate.csv").string());
  }
  return result;
}

CsvTable aggregate(const std::vector<CsvTable>& runs, const std::function<void(const std::string&)>& warn) {
  if (runs.empty()) throw ConfigError("nothing to aggregate");
  const std::vector<std::string> fields{"mean_return", "success_rate", "death_rate", "episodes"};
  struct Series {
    std::vector<long> steps;
    std::vector<std::vector<double>> values;  // per field
  };
  // (experiment, agent, task) -> seed series
  std::map<std::tuple<std::string, std::string, int>, std::vector<Series>> groups;
  for (const auto& t : runs) {
    const std::size_t ce = t.column("experiment"), ca = t.column("agent"), ct = t.column("task"),
                      cs = t.column("task_steps");
    std::vector<std::size_t> cf;
    for (const auto& f : fields) cf.push_back(t.column(f));
    std::map<std::tuple<std::string, std::string, int>, Series> local;
    for (const auto& r : t.rows) {
      Series& s = local[{r[ce], r[ca], std::stoi(r[ct])}];
      if (s.values.empty()) s.values.resize(fields.size());
      s.steps.push_back(std::stol(r[cs]));
      for (std::size_t f = 0; f < fields.size(); ++f) s.values[f].push_back(std::stod(r[cf[f]]));
    }
    for (auto& [k, s] : local) groups[k].push_back(std::move(s));
  }

  CsvTable out;
  out.header = {"experiment", "agent", "task", "task_steps", "seeds"};
  for (const auto& f : fields) {
    out.header.push_back(f + "_mean");
    out.header.push_back(f + "_std");
  }
  for (const auto& [key, series] : groups) {
    // coarsest grid: the series with the fewest points
    const Series* grid = &series.front();
    bool mismatch = false;
    for (const auto& s : series) {
      if (s.steps != grid->steps) mismatch = true;
      if (s.steps.size() < grid->steps.size()) grid = &s;
    }
    if (mismatch && warn)
      warn("step grids differ for " + std::get<1>(key) + " task " + std::to_string(std::get<2>(key)) +
           "; resampling onto the coarsest grid");
    for (long x : grid->steps) {
      std::vector<std::string> row{std::get<0>(key), std::get<1>(key), std::to_string(std::get<2>(key)),
                                   std::to_string(x), std::to_string(series.size())};
      for (std::size_t f = 0; f < fields.size(); ++f) {
        std::vector<double> vals;
        for (const auto& s : series) {
          auto it = std::upper_bound(s.steps.begin(), s.steps.end(), x);
          const std::size_t idx = it == s.steps.begin() ? 0 : std::size_t(it - s.steps.begin()) - 1;
          vals.push_back(s.values[f][idx]);
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= double(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        row.push_back(format_double(mean));
        row.push_back(format_double(std::sqrt(var / double(vals.size()))));
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

double final_value(const RunLog& log, int task, const std::function<double(const EvalRow&)>& field, int n) {
  std::vector<double> vals;
  for (const auto& r : log.rows)
    if (r.task == task) vals.push_back(field(r));
  if (vals.empty()) throw UsageError("run has no rows for task " + std::to_string(task));
  const std::size_t k = std::min<std::size_t>(std::size_t(std::max(n, 1)), vals.size());
  double sum = 0.0;
  for (std::size_t i = vals.size() - k; i < vals.size(); ++i) sum += vals[i];
  return sum / double(k);
}

double curve_area(const RunLog& log, int task, const std::function<double(const EvalRow&)>& field) {
  double area = 0.0;
  long prev = 0;
  for (const auto& r : log.rows) {
    if (r.task != task) continue;
    area += field(r) * double(r.task_steps - prev);
    prev = r.task_steps;
  }
  return area;
}

std::optional<long> steps_to_reach(const RunLog& log, int task, const std::function<double(const EvalRow&)>& field,
                                   double level) {
  for (const auto& r : log.rows)
    if (r.task == task && field(r) >= level) return r.task_steps;
  return std::nullopt;
}

}  // namespace ihrl
