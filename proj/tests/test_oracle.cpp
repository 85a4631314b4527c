#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace crowdasm;
using crowdasm::testing::batch_of;
using crowdasm::testing::make_worker;
using crowdasm::testing::single_skill_config;
using crowdasm::testing::state_for;

namespace {
MarketConfig fixture(const std::string& name) {
  return load_config(std::string(CROWDASM_SCENARIO_DIR) + "/" + name + ".json");
}
}  // namespace

TEST(BruteForce, PositiveScoresNoShortfall) {
  auto cfg = single_skill_config(1, 3, 1.0, 3, 10.0);
  std::vector<Worker> roster;
  for (int i = 0; i < 4; ++i) roster.push_back(make_worker(i, 0, 0.7, Presence::logged_in));
  roster.push_back(make_worker(9, 0, 0.9));
  auto state = state_for(cfg, roster);
  state.q = {10};
  const auto res = brute_force_mobilization(state, roster, batch_of(cfg, {2}), cfg);
  ASSERT_TRUE(res.found);
  EXPECT_EQ(res.best_a, std::vector<int>{0});
  EXPECT_EQ(res.evaluated_count, 4);
}

TEST(BruteForce, ZeroBudgetForcesZero) {
  auto cfg = single_skill_config(1, 3, 1.0, 3, 0.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.9), make_worker(1, 0, 0.8)};
  const auto res = brute_force_mobilization(state_for(cfg, roster), roster, batch_of(cfg, {2}), cfg);
  ASSERT_TRUE(res.found);
  EXPECT_EQ(res.best_a, std::vector<int>{0});
  EXPECT_EQ(res.served_set, std::vector<int>{0});
  EXPECT_EQ(res.feasible_count, 1);
}

TEST(BruteForce, RejectsHugeBoxes) {
  MarketConfig cfg = default_config();
  cfg.mobilization_cap = {2000, 2000};
  std::vector<Worker> roster;
  try {
    brute_force_mobilization(SkillQueueState{{0, 0}, {0, 0}, {0, 0}}, roster, batch_of(cfg, {0, 0}), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SearchSpaceTooLarge);
  }
}

TEST(BruteForce, NeverWorseThanPlannerForSameServedSet) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto inst = random_tiny_instance(70000 + s);
    const auto plan = plan_mobilization(inst.state, inst.roster, inst.batch, inst.cfg);
    const auto res = brute_force_mobilization(inst.state, inst.roster, inst.batch, inst.cfg, plan.served);
    ASSERT_TRUE(res.found) << s;
    const auto pool = pool_reliabilities(inst.roster, inst.cfg.skills, inst.cfg.epsilon);
    const auto scores = mobilization_scores(inst.state.q, inst.cfg.rho, inst.cfg.mobilization_cost, pool);
    EXPECT_LE(res.best_objective, plan_objective(plan.a, scores) + 1e-12);
    auto chosen = make_plan(res.best_a, res.served_set, inst.state, inst.roster, inst.batch, inst.cfg);
    ASSERT_TRUE(chosen.has_value());
    EXPECT_TRUE(plan_violations(*chosen, inst.state, inst.roster, inst.batch, inst.cfg).empty());
  }
}

TEST(Equivalence, SmallBatchAgrees) {
  const auto st = oracle_equivalence(100, 424242);
  EXPECT_EQ(st.instances, 100);
  EXPECT_EQ(st.mismatches, 0);
  EXPECT_LE(st.max_abs_diff, 1e-12);
}

TEST(HorizonOptimal, RequiresDeterministicScript) {
  auto cfg = fixture("tiny3");
  cfg.outcome_model = OutcomeModel::bernoulli;
  EXPECT_THROW(horizon_optimal(cfg), Error);
  cfg = fixture("tiny3");
  cfg.arrival_script.reset();
  EXPECT_THROW(horizon_optimal(cfg), Error);
  cfg = fixture("tiny3");
  cfg.horizon = 40;
  try {
    horizon_optimal(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SearchSpaceTooLarge);
  }
}

TEST(HorizonOptimal, SingleStepMatchesEnumeration) {
  auto cfg = fixture("pair5");
  cfg.horizon = 1;
  const double opt = horizon_optimal_profit(cfg);
  const auto trace = run(cfg, "oracle-step");
  EXPECT_NEAR(opt, trace.steps[0].expected_profit, 1e-12);
}

TEST(HorizonOptimal, DominatesEveryPolicy) {
  for (const char* name : {"tiny3", "pair5", "budget6", "service6", "lowrep5"}) {
    const auto cfg = fixture(name);
    const double opt = horizon_optimal_profit(cfg);
    for (const char* policy : {"crowdasm", "never", "max", "random", "oracle-step"})
      EXPECT_GE(opt + 1e-12, time_averaged_profit(run(cfg, policy))) << name << " " << policy;
  }
}

TEST(HorizonOptimal, Tiny3MatchesHandComputation) {
  // Step 0 mobilizes the two best of three eligible offline workers, the others serve from the queue.
  const double r0 = (5.0 / 6.0 + 4.0 / 5.0 + 3.0 / 4.0) / 3.0;
  const double d0 = 2.0 / std::sqrt(r0) * 2.0 - 2.0 / r0;
  const double d12 = 2.0 / std::sqrt(0.75) * 2.0;
  EXPECT_NEAR(horizon_optimal_profit(fixture("tiny3")), (d0 + 2.0 * d12) / 3.0, 1e-12);
}

TEST(HorizonOptimal, MonotoneInBudgetAndCaps) {
  for (const char* name : {"tiny3", "budget6", "lowrep5"}) {
    const auto base = fixture(name);
    const double opt = horizon_optimal_profit(base);
    auto richer = base;
    for (auto& b : richer.budget_per_step) b += 1.5;
    EXPECT_GE(horizon_optimal_profit(richer) + 1e-12, opt) << name;
    auto tighter = base;
    for (auto& b : tighter.budget_per_step) b = std::max(0.0, b - 1.0);
    EXPECT_LE(horizon_optimal_profit(tighter), opt + 1e-12) << name;
    auto capped = base;
    for (auto& c : capped.mobilization_cap) c = std::max(0, c - 1);
    EXPECT_LE(horizon_optimal_profit(capped), opt + 1e-12) << name;
  }
}

TEST(HorizonOptimal, StagedMobilizationCounterexample) {
  // The controller serves a type in full or rolls it back, so it never stages workers across
  // steps. Here the horizon optimum does, and the gap exceeds xi / rho.
  const auto cfg = load_config(std::string(CROWDASM_SCENARIO_DIR) + "/counterexamples/staged_mobilization.json");
  const double opt = horizon_optimal_profit(cfg);
  const double avg = time_averaged_profit(run(cfg, "crowdasm"));
  const auto rep = bound_check(avg, opt, compute_xi(cfg), 1.0);
  EXPECT_FALSE(rep.satisfied);
  EXPECT_LT(rep.margin, -5.0);
}
