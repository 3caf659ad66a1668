#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "ihrl/errors.hpp"
#include "ihrl/option_runtime.hpp"
#include "support/oracles.hpp"

using namespace ihrl;

namespace {

struct Kdt1 {
  EnvConfig config = [] {
    EnvConfig c = default_config(LayoutId::kKdt1);
    c.action_noise = 0.0;
    return c;
  }();
  GridEnv env{config};
  Compression f{default_compression(LayoutId::kKdt1), env.width(), env.height()};

  Transition move(Cell from, int action, Inventory inv = 0, int t = 0) const {
    GridState s = env.reset();
    s.x = from.x;
    s.y = from.y;
    s.inventory = inv;
    s.t = t;
    Rng rng(0);
    return env.step(s, action, rng);
  }
};

const int kUp = 0, kDown = 1, kLeft = 2, kRight = 3;

// Table worker that prefers one action everywhere.
Worker fixed_action_worker(int action) {
  TabularWorker w({0.1, 0.0, 0.99, 0.0});
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 17; ++x) {
      auto& row = w.table()[{x, y}];
      row.fill(0.0);
      row[std::size_t(action)] = 1.0;
    }
  return Worker(std::move(w));
}

}  // namespace

TEST(OptionReward, NavigateExitsAndInteriorSteps) {
  const Kdt1 k;
  // region 0 covers x,y in [0,4); region 1 is east of it, region 5 south
  const OptionSpec nav = OptionSpec::for_key(OptionKey::navigate(0, 1));
  EXPECT_EQ(nav.step_limit, 100);

  const auto hit = classify_option_step(nav, k.move({3, 2}, kRight), k.f, 3);
  EXPECT_TRUE(hit.ends && hit.success && hit.worker_terminal);
  EXPECT_EQ(hit.reward, 0.8);
  EXPECT_EQ(hit.cause, TerminationCause::kReachedTarget);

  const auto wrong = classify_option_step(nav, k.move({2, 3}, kDown), k.f, 3);
  EXPECT_TRUE(wrong.ends && !wrong.success);
  EXPECT_EQ(wrong.reward, -0.1);
  EXPECT_EQ(wrong.cause, TerminationCause::kWrongNeighbor);

  const auto interior = classify_option_step(nav, k.move({2, 2}, kLeft), k.f, 50);
  EXPECT_FALSE(interior.ends);
  EXPECT_EQ(interior.reward, 0.0);

  const auto timeout = classify_option_step(nav, k.move({2, 2}, kLeft), k.f, 100);
  EXPECT_TRUE(timeout.ends && timeout.worker_terminal && !timeout.success);
  EXPECT_EQ(timeout.reward, -0.1);
  EXPECT_EQ(timeout.cause, TerminationCause::kTimeout);
}

TEST(OptionReward, TaskStateChangesDuringNavigation) {
  const Kdt1 k;
  // key at (5,5) sits in region 6; step onto it from (4,5)
  const RegionId z = k.f(4, 5);
  ASSERT_EQ(z, k.f(5, 5));
  const auto nav = classify_option_step(OptionSpec::for_key(OptionKey::navigate(z, z + 1)),
                                        k.move({4, 5}, kRight), k.f, 4);
  EXPECT_TRUE(nav.ends && !nav.success);
  EXPECT_EQ(nav.reward, -0.1);
  EXPECT_EQ(nav.cause, TerminationCause::kTaskStateChange);

  const auto task = classify_option_step(OptionSpec::for_key(OptionKey::task(z, 0, kHasKey)),
                                         k.move({4, 5}, kRight), k.f, 4);
  EXPECT_TRUE(task.ends && task.success);
  EXPECT_EQ(task.reward, 0.8);

  const auto other = classify_option_step(OptionSpec::for_key(OptionKey::task(z, 0, kDoorOpen)),
                                          k.move({4, 5}, kRight), k.f, 4);
  EXPECT_FALSE(other.success);
  EXPECT_EQ(other.reward, -0.1);
}

TEST(OptionReward, ExplorationEndsOnAnyChangeWithoutShapedReward) {
  const Kdt1 k;
  const OptionSpec e = OptionSpec::for_key(OptionKey::explore(0));
  EXPECT_EQ(e.step_limit, 0);
  const auto out = classify_option_step(e, k.move({3, 2}, kRight), k.f, 7);
  EXPECT_TRUE(out.ends && out.success);
  EXPECT_EQ(out.reward, 0.0);
  EXPECT_FALSE(classify_option_step(e, k.move({2, 2}, kLeft), k.f, 500).ends);
}

TEST(OptionReward, BudgetTruncationBootstraps) {
  const Kdt1 k;
  const OptionSpec nav = OptionSpec::for_key(OptionKey::navigate(0, 1));
  const auto out = classify_option_step(nav, k.move({2, 2}, kLeft, 0, k.config.budget - 1), k.f, 5);
  EXPECT_TRUE(out.ends && out.truncated);
  EXPECT_FALSE(out.worker_terminal);
  EXPECT_EQ(out.reward, 0.0);
  EXPECT_EQ(out.cause, TerminationCause::kEnvTerminal);
}

TEST(OptionReward, DeathIsAFailedExit) {
  EnvConfig c = default_config(LayoutId::kHazard);
  c.action_noise = 0.0;
  const GridEnv env(c);
  const Compression f(default_compression(LayoutId::kHazard), env.width(), env.height());
  GridState s = env.reset();
  s.x = 11;
  s.y = 6;
  ASSERT_EQ(env.map().at({10, 6}), Terrain::kFatal);
  Rng rng(1);
  const Transition tr = env.step(s, kLeft, rng);
  const auto out = classify_option_step(OptionSpec::for_key(OptionKey::navigate(f(s), f(s) + 4)), tr, f, 2);
  EXPECT_TRUE(out.ends && out.worker_terminal && !out.success);
  EXPECT_EQ(out.reward, -0.1);
  EXPECT_EQ(out.cause, TerminationCause::kEnvTerminal);
}

// Every (cell, action, step count) of every navigate option on kdt1 emits a
// reward from {+0.8, -0.1, 0}, decided by where the move lands and whether it
// touched an object.
TEST(OptionRewardProperty, ExhaustiveRewardPartition) {
  const Kdt1 k;
  const auto edges = ref::enumerate_edges(k.env, k.f);
  ASSERT_FALSE(edges.empty());
  for (auto [z, target] : edges) {
    const OptionSpec spec = OptionSpec::for_key(OptionKey::navigate(z, target));
    for (int y = 0; y < k.env.height(); ++y)
      for (int x = 0; x < k.env.width(); ++x) {
        if (!k.env.map().floor({x, y}) || k.f(x, y) != z) continue;
        for (int a = 0; a < kNumActions; ++a)
          for (int steps : {1, 50, 99, 100}) {
            const Transition tr = k.move({x, y}, a, kHasKey | kDoorOpen);
            const auto r = classify_option_step(spec, tr, k.f, steps);
            const RegionId lands = k.f(tr.next_state);
            const bool task_changed = tr.next_state.inventory != tr.state.inventory;
            double expected = 0.0;
            if (lands == target) expected = 0.8;
            else if (lands != z || task_changed || steps == 100) expected = -0.1;
            ASSERT_EQ(r.reward, expected);
            ASSERT_EQ(r.ends, expected != 0.0);
          }
      }
  }
}

TEST(RunOption, ConvergedWorkerExitsTowardsTargetQuickly) {
  const Kdt1 k;
  const RegionId z = k.f(1, 1);
  const RegionId target = k.f(4, 1);
  const auto mdp = ref::enumerate_option_mdp(k.env, k.f, z, target);
  TabularWorker tw({1.0, 0.0, 0.99, 0.0});
  ref::train_by_sweeps(tw, mdp, 50, 1.0);
  Worker w(std::move(tw));
  Rng env_rng(2), agent_rng(3);
  const OptionOutcome out = run_option_frozen(k.env.reset(), OptionSpec::for_key(OptionKey::navigate(z, target)),
                                              k.env, k.f, &w, env_rng, agent_rng, true);
  EXPECT_EQ(out.cause, TerminationCause::kReachedTarget);
  EXPECT_TRUE(out.success);
  EXPECT_LE(out.duration, 7);
  EXPECT_EQ(k.f(out.final_state), target);
}

TEST(RunOption, TimesOutAtTheStepLimit) {
  const Kdt1 k;
  Worker w = fixed_action_worker(kUp);
  Rng env_rng(4), agent_rng(5);
  RunOptionParams p;
  p.greedy = true;
  const OptionOutcome out =
      run_option(k.env.reset(), OptionSpec::for_key(OptionKey::navigate(0, 1)), k.env, k.f, &w, env_rng, agent_rng, p);
  EXPECT_EQ(out.cause, TerminationCause::kTimeout);
  EXPECT_EQ(out.duration, 100);
  EXPECT_EQ(out.final_option_reward, -0.1);
  ASSERT_EQ(out.worker_steps.size(), 100u);
  EXPECT_TRUE(out.worker_steps.back().terminal);
  // 98 bumps into the wall bootstrap from the cell's own value, then the timeout step
  double q = 1.0;
  for (int i = 0; i < 98; ++i) q += 0.1 * (0.99 * q - q);
  q += 0.1 * (-0.1 - q);
  EXPECT_NEAR(w.tabular()->q({2, 1}, kUp), q, 1e-12);
}

TEST(RunOption, EnvTerminalMidOptionCarriesDiscountedTaskReward) {
  const Kdt1 k;
  // treasure at (13,13); start two cells east of it in the same region
  GridState s = k.env.reset();
  s.x = 15;
  s.y = 13;
  s.inventory = kHasKey | kDoorOpen;
  const RegionId z = k.f(s);
  ASSERT_EQ(z, k.f(k.env.treasure()));
  Worker w = fixed_action_worker(kLeft);
  Rng env_rng(6), agent_rng(7);
  RunOptionParams p;
  p.greedy = true;
  p.keep_trajectory = true;
  const OptionOutcome out =
      run_option(s, OptionSpec::for_key(OptionKey::navigate(z, z + 1)), k.env, k.f, &w, env_rng, agent_rng, p);
  EXPECT_EQ(out.cause, TerminationCause::kEnvTerminal);
  EXPECT_EQ(out.duration, 2);
  EXPECT_DOUBLE_EQ(out.discounted_reward, 0.99 * 1.0);
  EXPECT_DOUBLE_EQ(out.total_reward, 1.0);
  EXPECT_EQ(out.trajectory.size(), 2u);
}

TEST(RunOption, ExplorationOptionStopsAtTheFirstRegionChange) {
  const Kdt1 k;
  Rng env_rng(8), agent_rng(9);
  for (int i = 0; i < 50; ++i) {
    const OptionOutcome out = run_option(k.env.reset(), OptionSpec::for_key(OptionKey::explore(0)), k.env, k.f,
                                         nullptr, env_rng, agent_rng);
    EXPECT_TRUE(out.success || out.cause == TerminationCause::kEnvTerminal);
    if (out.success) EXPECT_NE(k.f(out.final_state), 0);
    EXPECT_TRUE(out.worker_steps.empty());
  }
}

TEST(RunOption, RejectsStartsOutsideTheInitiationRegion) {
  const Kdt1 k;
  Worker w = fixed_action_worker(kUp);
  Rng env_rng(10), agent_rng(11);
  EXPECT_THROW(run_option(k.env.reset(), OptionSpec::for_key(OptionKey::navigate(1, 2)), k.env, k.f, &w, env_rng,
                          agent_rng),
               UsageError);
  EXPECT_THROW(run_option(k.env.reset(), OptionSpec::for_key(OptionKey::navigate(0, 1)), k.env, k.f, nullptr,
                          env_rng, agent_rng),
               UsageError);
}

TEST(RunOption, SuccessCreditIsHeldBackWhenDeferred) {
  const Kdt1 k;
  Worker w = fixed_action_worker(kRight);
  Rng env_rng(12), agent_rng(13);
  RunOptionParams p;
  p.greedy = true;
  p.defer_success_credit = true;
  const OptionOutcome out =
      run_option(k.env.reset(), OptionSpec::for_key(OptionKey::navigate(0, 1)), k.env, k.f, &w, env_rng, agent_rng, p);
  ASSERT_TRUE(out.success);
  ASSERT_TRUE(out.deferred);
  EXPECT_EQ(w.tabular()->q({3, 2}, kRight), 1.0);  // exit step not yet applied
  w.credit(*out.deferred, 1.0);
  EXPECT_DOUBLE_EQ(w.tabular()->q({3, 2}, kRight), 1.0 + 0.1 * (1.8 - 1.0));
}

TEST(ExplorationPolicy, UniformAndReproducible) {
  Rng rng(14);
  std::array<int, kNumActions> counts{};
  for (int i = 0; i < 10000; ++i) ++counts[std::size_t(exploration_policy(rng))];
  for (int c : counts) EXPECT_NEAR(c / 10000.0, 0.25, 0.02);
  Rng a(15), b(15);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(exploration_policy(a), exploration_policy(b));
}

TEST(ControllabilityTracker, RhoIsSuccessFractionOfTheWindow) {
  for (int successes : {10, 0, 7}) {
    ControllabilityTracker t(10);
    t.add_pending(OptionKey::navigate(0, 1), {});
    std::vector<MaturedCredit> matured;
    for (int i = 0; i < 10; ++i) {
      auto m = t.record_completion(i < successes);
      if (i < 9) EXPECT_TRUE(m.empty());
      matured.insert(matured.end(), m.begin(), m.end());
    }
    ASSERT_EQ(matured.size(), 1u);
    EXPECT_DOUBLE_EQ(matured[0].rho, successes / 10.0);
    EXPECT_EQ(matured[0].window, 10);
    EXPECT_EQ(t.pending(), 0u);
  }
}

TEST(ControllabilityTracker, FlushUsesThePartialWindow) {
  ControllabilityTracker t(10);
  t.add_pending(OptionKey::navigate(0, 1), {});
  t.record_completion(true);
  t.record_completion(false);
  t.record_completion(true);
  t.add_pending(OptionKey::navigate(1, 2), {});
  const auto m = t.flush();
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m[0].rho, 2.0 / 3.0);
  EXPECT_EQ(m[0].window, 3);
  EXPECT_EQ(m[1].rho, 0.0);
  EXPECT_EQ(m[1].window, 0);
  EXPECT_THROW(ControllabilityTracker(0), ConfigError);
}

// Every pending record matures exactly once, after exactly M completions or
// at a flush, and rho stays in [0, 1].
TEST(ControllabilityTrackerProperty, CreditConservation) {
  Rng rng(16);
  ControllabilityTracker t(10);
  int added = 0, matured = 0;
  std::map<int, int> age;  // record id -> completions seen since it was added
  int next_id = 0;
  auto check = [](const MaturedCredit& m) {
    EXPECT_GE(m.rho, 0.0);
    EXPECT_LE(m.rho, 1.0);
    EXPECT_LE(m.successes, m.window);
  };
  for (int step = 0; step < 5000; ++step) {
    if (uniform01(rng) < 0.3) {
      DeferredCredit c;
      c.trajectory.push_back({{next_id, 0, 0}, 0, 0.8, {}, true, false});
      t.add_pending(OptionKey::navigate(0, 1), std::move(c));
      age[next_id++] = 0;
      ++added;
    }
    const auto out = t.record_completion(uniform01(rng) < 0.6);
    for (auto& [id, a] : age) ++a;
    for (const auto& m : out) {
      check(m);
      EXPECT_EQ(m.window, 10);
      const auto it = age.find(m.credit.trajectory.front().obs.x);
      ASSERT_NE(it, age.end());
      EXPECT_EQ(it->second, 10);
      age.erase(it);
      ++matured;
    }
    for (const auto& [id, a] : age) ASSERT_LT(a, 10);
    if (uniform01(rng) < 0.01) {
      for (const auto& m : t.flush()) {
        check(m);
        EXPECT_EQ(m.window, age.at(m.credit.trajectory.front().obs.x));
        ++matured;
      }
      age.clear();
    }
  }
  matured += int(t.flush().size());
  EXPECT_EQ(matured, added);
}
