#include "ihrl/persistence.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ihrl/errors.hpp"
#include "json.hpp"

namespace ihrl {

using nlohmann::json;

namespace {

json compression_to_json(const CompressionSpec& c) {
  return {{"cell_width", c.cell_width}, {"cell_height", c.cell_height}, {"origin_x", c.origin_x},
          {"origin_y", c.origin_y}};
}

CompressionSpec compression_from_json(const json& j) {
  return {j.at("cell_width").get<int>(), j.at("cell_height").get<int>(), j.at("origin_x").get<int>(),
          j.at("origin_y").get<int>()};
}

json worker_config_to_json(const WorkerConfig& c) {
  const SilConfig& s = c.sil;
  return {{"kind", to_string(c.kind)},
          {"tabular",
           {{"alpha", c.tabular.alpha},
            {"epsilon", c.tabular.epsilon},
            {"gamma", c.tabular.gamma},
            {"initial_q", c.tabular.initial_q}}},
          {"sil",
           {{"hidden", s.hidden},
            {"lr", s.lr},
            {"optimizer", to_string(s.optimizer)},
            {"max_grad_norm", s.max_grad_norm},
            {"entropy", s.entropy},
            {"n_step", s.n_step},
            {"sil_updates", s.sil_updates},
            {"sil_batch", s.sil_batch},
            {"sil_policy_weight", s.sil_policy_weight},
            {"sil_value_weight", s.sil_value_weight},
            {"capacity", s.capacity},
            {"priority_alpha", s.priority_alpha},
            {"priority_beta", s.priority_beta},
            {"priority_floor", s.priority_floor},
            {"gamma", s.gamma}}}};
}

WorkerConfig worker_config_from_json(const json& j) {
  WorkerConfig c;
  c.kind = worker_kind_from_string(j.at("kind").get<std::string>());
  const json& t = j.at("tabular");
  c.tabular = {t.at("alpha").get<double>(), t.at("epsilon").get<double>(), t.at("gamma").get<double>(),
               t.at("initial_q").get<double>()};
  const json& s = j.at("sil");
  c.sil.hidden = s.at("hidden").get<std::vector<int>>();
  c.sil.lr = s.at("lr").get<double>();
  c.sil.optimizer = optimizer_from_string(s.at("optimizer").get<std::string>());
  c.sil.max_grad_norm = s.at("max_grad_norm").get<double>();
  c.sil.entropy = s.at("entropy").get<double>();
  c.sil.n_step = s.at("n_step").get<int>();
  c.sil.sil_updates = s.at("sil_updates").get<int>();
  c.sil.sil_batch = s.at("sil_batch").get<int>();
  c.sil.sil_policy_weight = s.at("sil_policy_weight").get<double>();
  c.sil.sil_value_weight = s.at("sil_value_weight").get<double>();
  c.sil.capacity = s.at("capacity").get<std::size_t>();
  c.sil.priority_alpha = s.at("priority_alpha").get<double>();
  c.sil.priority_beta = s.at("priority_beta").get<double>();
  c.sil.priority_floor = s.at("priority_floor").get<double>();
  c.sil.gamma = s.at("gamma").get<double>();
  return c;
}

template <typename V>
json vector_to_json(const V& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

SilWorker::Net::Vector vector_from_json(const json& j, Eigen::Index expected) {
  if (!j.is_array() || Eigen::Index(j.size()) != expected)
    throw LoadError("parameter vector has " + std::to_string(j.size()) + " entries, expected " +
                    std::to_string(expected));
  SilWorker::Net::Vector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v[i] = j[std::size_t(i)].get<float>();
  return v;
}

json optimizer_to_json(const Optimizer<float>& o) {
  return {{"t", o.steps()}, {"m", vector_to_json(o.first_moment())}, {"v", vector_to_json(o.second_moment())}};
}

void optimizer_from_json(const json& j, Optimizer<float>& o, Eigen::Index n) {
  if (o.kind() == OptimizerKind::kAdam)
    o.restore(j.at("t").get<long>(), vector_from_json(j.at("m"), n), vector_from_json(j.at("v"), n));
  else
    o.restore(j.at("t").get<long>(), {}, {});
}

json worker_to_json(const Worker& w) {
  if (const TabularWorker* t = w.tabular()) {
    json rows = json::array();
    for (const auto& [cell, q] : t->table()) rows.push_back({cell.x, cell.y, q[0], q[1], q[2], q[3]});
    return {{"kind", "tabular"}, {"table", rows}};
  }
  const SilWorker& s = *w.sil();
  std::ostringstream rng;
  rng << s.rng();
  return {{"kind", "sil"},
          {"policy", vector_to_json(s.policy().params())},
          {"value", vector_to_json(s.value().params())},
          {"policy_opt", optimizer_to_json(s.policy_optimizer())},
          {"value_opt", optimizer_to_json(s.value_optimizer())},
          {"rng", rng.str()}};
}

Worker worker_from_json(const json& j, const WorkerConfig& config, const ObservationEncoder& encoder) {
  const auto kind = worker_kind_from_string(j.at("kind").get<std::string>());
  if (kind != config.kind) throw LoadError("worker kind does not match the stored worker configuration");
  Worker w = make_worker(config, encoder, 0);
  if (TabularWorker* t = w.tabular()) {
    for (const json& row : j.at("table")) {
      if (!row.is_array() || row.size() != 6) throw LoadError("malformed Q-table row");
      t->table()[{row[0].get<int>(), row[1].get<int>()}] = {row[2].get<double>(), row[3].get<double>(),
                                                            row[4].get<double>(), row[5].get<double>()};
    }
    return w;
  }
  SilWorker& s = *w.sil();
  s.policy().params() = vector_from_json(j.at("policy"), s.policy().num_params());
  s.value().params() = vector_from_json(j.at("value"), s.value().num_params());
  optimizer_from_json(j.at("policy_opt"), s.policy_optimizer(), s.policy().num_params());
  optimizer_from_json(j.at("value_opt"), s.value_optimizer(), s.value().num_params());
  std::istringstream rng(j.at("rng").get<std::string>());
  rng >> s.rng();
  if (!rng) throw LoadError("malformed worker random state");
  return w;
}

json graph_to_json(const RegionGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    const EdgeStats& st = g.stats(e);
    edges.push_back({{"from", e.first},
                     {"to", e.second},
                     {"attempts", st.attempts},
                     {"successes", st.successes},
                     {"worker", worker_to_json(g.worker(e))}});
  }
  return {{"seed", g.seed()}, {"regions", g.regions()}, {"edges", edges}};
}

RegionGraph graph_from_json(const json& j, const WorkerConfig& config, int width, int height) {
  RegionGraph g(config, ObservationEncoder{width, height, false}, j.at("seed").get<std::uint64_t>());
  for (const json& z : j.at("regions")) g.add_region(z.get<RegionId>());
  for (const json& e : j.at("edges")) {
    EdgeStats st{e.at("attempts").get<long>(), e.at("successes").get<long>()};
    if (st.successes > st.attempts || st.successes < 0) throw LoadError("edge has more successes than attempts");
    g.restore_edge({e.at("from").get<RegionId>(), e.at("to").get<RegionId>()},
                   worker_from_json(e.at("worker"), config, g.encoder()), st);
  }
  return g;
}

json manager_to_json(const ManagerQ& q) {
  const ManagerConfig& c = q.config();
  json entries = json::array();
  for (const auto& [k, v] : q.entries())
    entries.push_back({{"region", k.first.region}, {"task", int(k.first.task)}, {"option", to_string(k.second)},
                       {"value", v}});
  return {{"config",
           {{"alpha", c.alpha},
            {"gamma", c.gamma},
            {"epsilon_start", c.epsilon_start},
            {"epsilon_end", c.epsilon_end},
            {"decay_steps", c.decay_steps}}},
          {"entries", entries}};
}

ManagerQ manager_from_json(const json& j) {
  const json& c = j.at("config");
  ManagerQ q(ManagerConfig{c.at("alpha").get<double>(), c.at("gamma").get<double>(),
                           c.at("epsilon_start").get<double>(), c.at("epsilon_end").get<double>(),
                           c.at("decay_steps").get<long>()});
  for (const json& e : j.at("entries"))
    q.set({e.at("region").get<RegionId>(), Inventory(e.at("task").get<int>())},
          option_key_from_string(e.at("option").get<std::string>()), e.at("value").get<double>());
  return q;
}

json registry_to_json(const TaskStateRegistry& r) {
  json options = json::array();
  for (const auto& [k, w] : r.workers()) options.push_back({{"option", to_string(k)}, {"worker", worker_to_json(w)}});
  json states = json::array();
  for (Inventory s : r.states()) states.push_back(int(s));
  return {{"states", states}, {"options", options}};
}

void registry_from_json(const json& j, TaskStateRegistry& r, const WorkerConfig& config, int width, int height) {
  for (const json& s : j.at("states")) r.register_state(Inventory(s.get<int>()));
  for (const json& o : j.at("options"))
    r.restore_option(option_key_from_string(o.at("option").get<std::string>()),
                     worker_from_json(o.at("worker"), config, ObservationEncoder{width, height, true}));
}

json envelope(const std::string& kind) { return {{"format", "ihrl-" + kind}, {"version", kSnapshotVersion}}; }

void check_envelope(const json& j, const std::string& kind) {
  if (!j.is_object() || j.value("format", "") != "ihrl-" + kind)
    throw LoadError("not an ihrl " + kind + " file");
  const int version = j.at("version").get<int>();
  if (version != kSnapshotVersion)
    throw LoadError("unsupported " + kind + " file version " + std::to_string(version));
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out.flush()) throw IoError("write to " + path + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
}

// Wraps nlohmann lookup/type errors so callers only ever see LoadError.
template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw LoadError(what + ": " + e.what());
  } catch (const UsageError& e) {
    throw LoadError(what + ": " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(what + ": " + e.what());
  }
}

json agent_to_json(const HrlAgent& a) {
  json j = envelope("agent");
  const HrlConfig& c = a.config();
  j["width"] = a.compression().width();
  j["height"] = a.compression().height();
  j["seed"] = a.seed();
  j["compression"] = compression_to_json(c.compression);
  j["worker_config"] = worker_config_to_json(c.worker);
  j["rewards"] = {{"success", c.rewards.success}, {"failure", c.rewards.failure}};
  j["controllability"] = c.controllability;
  j["controllability_horizon"] = c.controllability_horizon;
  j["relabel"] = c.relabel;
  j["gamma"] = c.gamma;
  j["graph"] = graph_to_json(a.graph());
  j["manager"] = manager_to_json(a.manager());
  j["registry"] = registry_to_json(a.registry());
  return j;
}

HrlAgent agent_from_json(const json& j) {
  check_envelope(j, "agent");
  HrlConfig c;
  c.compression = compression_from_json(j.at("compression"));
  c.worker = worker_config_from_json(j.at("worker_config"));
  c.rewards = {j.at("rewards").at("success").get<double>(), j.at("rewards").at("failure").get<double>()};
  c.controllability = j.at("controllability").get<bool>();
  c.controllability_horizon = j.at("controllability_horizon").get<int>();
  c.relabel = j.at("relabel").get<bool>();
  c.gamma = j.at("gamma").get<double>();
  const ManagerQ manager = manager_from_json(j.at("manager"));
  c.manager = manager.config();
  const int width = j.at("width").get<int>();
  const int height = j.at("height").get<int>();
  HrlAgent agent(c, width, height, j.at("seed").get<std::uint64_t>());
  agent.graph() = graph_from_json(j.at("graph"), c.worker, width, height);
  agent.manager() = manager;
  registry_from_json(j.at("registry"), agent.registry(), c.worker, width, height);
  return agent;
}

}  // namespace

void save_graph(const RegionGraph& graph, const Compression& f, const std::string& path) {
  json j = envelope("graph");
  j["width"] = f.width();
  j["height"] = f.height();
  j["compression"] = compression_to_json(f.spec());
  j["worker_config"] = worker_config_to_json(graph.worker_config());
  j["graph"] = graph_to_json(graph);
  write_text(path, j.dump(1));
}

GraphSnapshot load_graph(const std::string& path) {
  const json j = read_json(path);
  return guarded(path, [&] {
    check_envelope(j, "graph");
    const int width = j.at("width").get<int>();
    const int height = j.at("height").get<int>();
    const WorkerConfig config = worker_config_from_json(j.at("worker_config"));
    return GraphSnapshot{compression_from_json(j.at("compression")), width, height,
                         graph_from_json(j.at("graph"), config, width, height)};
  });
}

void save_manager(const ManagerQ& q, const std::string& path) {
  json j = envelope("manager");
  j["manager"] = manager_to_json(q);
  write_text(path, j.dump(1));
}

ManagerQ load_manager(const std::string& path) {
  const json j = read_json(path);
  return guarded(path, [&] {
    check_envelope(j, "manager");
    return manager_from_json(j.at("manager"));
  });
}

std::string serialize_agent(const HrlAgent& agent) { return agent_to_json(agent).dump(1); }

HrlAgent deserialize_agent(const std::string& text) {
  return guarded("agent snapshot", [&] {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw LoadError(std::string("agent snapshot: ") + e.what());
    }
    return agent_from_json(j);
  });
}

void save_agent(const HrlAgent& agent, const std::string& path) { write_text(path, serialize_agent(agent)); }

HrlAgent load_agent(const std::string& path) {
  const json j = read_json(path);
  return guarded(path, [&] { return agent_from_json(j); });
}

}  // namespace ihrl
