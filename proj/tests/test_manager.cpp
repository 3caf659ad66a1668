#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ihrl/errors.hpp"
#include "ihrl/hrl_agent.hpp"
#include "ihrl/manager.hpp"
#include "ihrl/persistence.hpp"
#include "support/oracles.hpp"

using namespace ihrl;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ManagerConfig alpha(double a) {
  ManagerConfig c;
  c.alpha = a;
  return c;
}

}  // namespace

TEST(ManagerQ, FreshRegionOnlyOffersExploration) {
  const ManagerQ q;
  Rng rng(1);
  const std::vector<OptionKey> only{OptionKey::explore(4)};
  EXPECT_EQ(q.get_option({4, 0}, only, 0.05, rng), OptionKey::explore(4));
}

TEST(ManagerQ, GreedyPicksTheLargestValue) {
  ManagerQ q;
  const ManagerState s{2, 0};
  const std::vector<OptionKey> opts{OptionKey::navigate(2, 3), OptionKey::navigate(2, 1), OptionKey::explore(2)};
  q.set(s, opts[0], 0.5);
  q.set(s, opts[1], 0.1);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(q.get_option(s, opts, 0.0, rng), opts[0]);
}

TEST(ManagerQ, FullExplorationIsUniform) {
  ManagerQ q;
  const ManagerState s{2, 0};
  const std::vector<OptionKey> opts{OptionKey::navigate(2, 3), OptionKey::navigate(2, 1), OptionKey::navigate(2, 7),
                                    OptionKey::explore(2)};
  q.set(s, opts[0], 5.0);
  Rng rng(3);
  std::map<OptionKey, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[q.get_option(s, opts, 1.0, rng)];
  for (const auto& o : opts) EXPECT_NEAR(double(counts[o]) / n, 0.25, 0.02);
}

TEST(ManagerQ, ExactTiesAreBrokenUniformly) {
  ManagerQ q;
  const ManagerState s{0, 1};
  const std::vector<OptionKey> opts{OptionKey::navigate(0, 1), OptionKey::task(0, 1, 3), OptionKey::explore(0)};
  q.set(s, opts[0], 0.3);
  q.set(s, opts[1], 0.3);
  q.set(s, opts[2], 0.1);
  Rng rng(4);
  std::map<OptionKey, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[q.get_option(s, opts, 0.0, rng)];
  EXPECT_NEAR(double(counts[opts[0]]) / n, 0.5, 0.02);
  EXPECT_NEAR(double(counts[opts[1]]) / n, 0.5, 0.02);
  EXPECT_EQ(counts[opts[2]], 0);
}

TEST(ManagerQ, RejectsOptionsFromOtherRegionsOrTaskStates) {
  ManagerQ q;
  Rng rng(5);
  const std::vector<OptionKey> foreign{OptionKey::navigate(3, 4), OptionKey::explore(2)};
  EXPECT_THROW(q.get_option({2, 0}, foreign, 0.0, rng), UsageError);
  const std::vector<OptionKey> none;
  EXPECT_THROW(q.get_option({2, 0}, none, 0.0, rng), UsageError);
  EXPECT_THROW(q.update({2, 0}, OptionKey::navigate(3, 4), 0.0, 1, {4, 0}, none, false), UsageError);
  EXPECT_THROW(q.update({2, 0}, OptionKey::task(2, 1, 3), 0.0, 1, {2, 3}, none, false), UsageError);
  EXPECT_THROW(q.update({2, 0}, OptionKey::explore(2), 0.0, 0, {2, 0}, none, false), UsageError);
}

TEST(ManagerQ, UpdateArithmetic) {
  ManagerQ zero;
  const std::vector<OptionKey> next{OptionKey::explore(1)};
  zero.update({0, 0}, OptionKey::navigate(0, 1), 0.0, 6, {1, 0}, next, false);
  EXPECT_EQ(zero.q({0, 0}, OptionKey::navigate(0, 1)), 0.0);

  ManagerQ one(alpha(1.0));
  EXPECT_DOUBLE_EQ(one.update({0, 0}, OptionKey::explore(0), 1.0, 1, {0, 0}, {}, true), 1.0);
}

// An option of fixed duration k whose only reward (1) arrives at its last
// step contributes gamma^(k-1); the bootstrap is discounted by gamma^k.
TEST(ManagerQ, SmdpDiscounting) {
  const double g = 0.99;
  for (int k : {1, 3, 17}) {
    ManagerQ q(alpha(1.0));
    const ManagerState s{0, 0}, s2{1, 0};
    const std::vector<OptionKey> next{OptionKey::navigate(1, 0), OptionKey::explore(1)};
    q.set(s2, next[0], 2.0);
    const double R = std::pow(g, k - 1);
    const double v = q.update(s, OptionKey::navigate(0, 1), R, k, s2, next, false);
    double by_hand = 0.0;
    for (int i = 0; i < k; ++i) by_hand += (i == k - 1 ? 1.0 : 0.0) * std::pow(g, i);
    by_hand += std::pow(g, k) * 2.0;
    EXPECT_NEAR(v, by_hand, 1e-15);
  }
}

TEST(ManagerQ, MatchesSmdpValueIterationOnAThreeRegionChain) {
  const double g = 0.99;
  // regions 0 - 1 - 2, treasure reachable by a task option in region 2
  const std::vector<std::vector<OptionKey>> opts{
      {OptionKey::navigate(0, 1), OptionKey::explore(0)},
      {OptionKey::navigate(1, 0), OptionKey::navigate(1, 2), OptionKey::explore(1)},
      {OptionKey::navigate(2, 1), OptionKey::task(2, 0, kHasTreasure), OptionKey::explore(2)},
  };
  ref::ChainSmdp m;
  m.next = {{1, 0}, {0, 2, 1}, {1, 2, 2}};
  m.duration = {{4, 3}, {5, 6, 2}, {3, 7, 1}};
  m.reward = {{0, 0}, {0, 0, 0}, {0, std::pow(g, 6), 0}};
  m.terminal = {{false, false}, {false, false, false}, {false, true, false}};
  const auto oracle = ref::smdp_value_iteration(m, g);

  ManagerQ q(alpha(0.5));
  for (int sweep = 0; sweep < 2000; ++sweep)
    for (std::size_t i = 0; i < opts.size(); ++i)
      for (std::size_t j = 0; j < opts[i].size(); ++j) {
        const std::size_t n = std::size_t(m.next[i][j]);
        q.update({RegionId(i), 0}, opts[i][j], m.reward[i][j], m.duration[i][j], {RegionId(n), 0}, opts[n],
                 m.terminal[i][j]);
      }
  double err = 0;
  for (std::size_t i = 0; i < opts.size(); ++i)
    for (std::size_t j = 0; j < opts[i].size(); ++j)
      err = std::max(err, std::abs(q.q({RegionId(i), 0}, opts[i][j]) - oracle[i][j]));
  EXPECT_LT(err, 1e-6);
  EXPECT_NEAR(oracle[0][0], std::pow(g, 4 + 6 + 6), 1e-12);
}

TEST(ManagerQ, EpsilonDecaysLinearly) {
  ManagerConfig c;
  c.decay_steps = 1000;
  const ManagerQ q(c);
  EXPECT_DOUBLE_EQ(q.epsilon(0), 0.05);
  EXPECT_DOUBLE_EQ(q.epsilon(500), 0.0275);
  EXPECT_DOUBLE_EQ(q.epsilon(1000), 0.005);
  EXPECT_DOUBLE_EQ(q.epsilon(5000), 0.005);
}

TEST(ManagerQ, CsvDump) {
  ManagerQ q;
  q.set({3, 1}, OptionKey::navigate(3, 4), 0.25);
  EXPECT_EQ(q.to_csv(), "region,task,option,value\n3,1,nav:3>4,0.25\n");
}

TEST(TaskStateRegistry, DiscoveryIsIdempotent) {
  TaskStateRegistry r(WorkerConfig{}, {17, 17, true}, 1);
  r.register_state(0);
  const auto first = r.observe_task_change(3, 0, kHasKey);
  EXPECT_TRUE(first.new_state);
  EXPECT_TRUE(first.new_option);
  const auto again = r.observe_task_change(3, 0, kHasKey);
  EXPECT_FALSE(again.new_state);
  EXPECT_FALSE(again.new_option);
  const auto door = r.observe_task_change(5, kHasKey, kHasKey | kDoorOpen);
  EXPECT_TRUE(door.new_option);
  EXPECT_TRUE(r.has_option(OptionKey::task(5, kHasKey, kHasKey | kDoorOpen)));
  EXPECT_EQ(r.options(3, 0), (std::vector<OptionKey>{OptionKey::task(3, 0, kHasKey)}));
  EXPECT_TRUE(r.options(3, kHasKey).empty());
  EXPECT_EQ(r.num_options(), 2u);
  EXPECT_EQ(r.states().size(), 3u);
  EXPECT_THROW(r.observe_task_change(3, 1, 1), UsageError);
}

class TrainedAgent : public ::testing::Test {
 protected:
  void SetUp() override {
    hc.compression = default_compression(LayoutId::kKdt1);
    agent = std::make_unique<HrlAgent>(hc, env.width(), env.height(), 7);
    agent->begin_task(30000);
    agent->train(env, 30000);
  }
  GridEnv env{default_config(LayoutId::kKdt1)};
  HrlConfig hc;
  std::unique_ptr<HrlAgent> agent;
};

TEST_F(TrainedAgent, EveryManagerEntryIsAdmissible) {
  ASSERT_FALSE(agent->manager().entries().empty());
  for (const auto& [key, v] : agent->manager().entries()) {
    EXPECT_EQ(key.second.region, key.first.region);
    if (key.second.kind == OptionKind::kTask) EXPECT_EQ(key.second.from, key.first.task);
    EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_GT(agent->registry().num_options(), 0u);
}

TEST_F(TrainedAgent, TransferResetKeepsOptionsAndClearsTheManager) {
  const RegionGraph before = agent->graph();
  const Edge probe = before.edges().front();
  auto probe_success = [&](const HrlAgent& a) {
    const OptionSpec spec = OptionSpec::for_key(OptionKey::navigate(probe.first, probe.second));
    Rng env_rng(8), agent_rng(9);
    int wins = 0, runs = 0;
    for (int y = 0; y < env.height(); ++y)
      for (int x = 0; x < env.width(); ++x) {
        if (!env.map().floor({x, y}) || a.compression()(x, y) != probe.first) continue;
        GridState s = env.reset();
        s.x = x;
        s.y = y;
        wins += run_option_frozen(s, spec, env, a.compression(), &a.graph().worker(probe), env_rng, agent_rng, true)
                    .success;
        ++runs;
      }
    return double(wins) / runs;
  };
  const double rate = probe_success(*agent);
  const auto dir = std::filesystem::temp_directory_path();
  save_graph(agent->graph(), agent->compression(), (dir / "ihrl_transfer_before.json").string());

  agent->reset_for_transfer();
  save_graph(agent->graph(), agent->compression(), (dir / "ihrl_transfer_after.json").string());
  EXPECT_EQ(slurp(dir / "ihrl_transfer_before.json"), slurp(dir / "ihrl_transfer_after.json"));
  EXPECT_TRUE(agent->manager().entries().empty());
  EXPECT_EQ(agent->registry().num_options(), 0u);
  EXPECT_TRUE(agent->graph() == before);
  EXPECT_EQ(probe_success(*agent), rate);
  for (const auto& o : agent->admissible_options({probe.first, 0})) {
    EXPECT_NE(o.kind, OptionKind::kTask);
    EXPECT_EQ(agent->manager().q({probe.first, 0}, o), 0.0);
  }
}
