#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "test_util.hpp"

using namespace crowdasm;
using crowdasm::testing::batch_of;
using crowdasm::testing::make_worker;
using crowdasm::testing::single_skill_config;
using crowdasm::testing::state_for;

TEST(MobilizationScore, HandValues) {
  EXPECT_DOUBLE_EQ(mobilization_score(5, 2.0, 1.0, 0.5), 1.0);
  EXPECT_NEAR(mobilization_score(10, 1e-12, 1.0, 0.5), 10.0, 1e-9);
  EXPECT_LT(mobilization_score(0, 0.1, 0.5, 0.9), 0.0);
  EXPECT_THROW(mobilization_score(1, 1.0, 1.0, 1.0), Error);
}

TEST(MobilizationScore, MissingPoolFallsBackToQueue) {
  const std::vector<int> q{3, 4};
  const std::vector<double> c{1.0, 1.0};
  const std::vector<std::optional<double>> pool{0.5, std::nullopt};
  const auto s = mobilization_scores(q, 1.0, c, pool);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 4.0);
}

TEST(MobilizationCost, HandValues) {
  EXPECT_DOUBLE_EQ(mobilization_cost(std::vector<int>{0, 0}, std::vector<double>{1, 2}, std::vector<double>{0.5, 0.5}),
                   0.0);
  EXPECT_DOUBLE_EQ(mobilization_cost(std::vector<int>{1}, std::vector<double>{2}, std::vector<double>{0.8}), 2.5);
  EXPECT_DOUBLE_EQ(
      mobilization_cost(std::vector<int>{2, 1}, std::vector<double>{1, 3}, std::vector<double>{0.5, 0.75}), 8.0);
}

TEST(MobilizationCost, Errors) {
  try {
    mobilization_cost(std::vector<int>{1}, std::vector<double>{1, 2}, std::vector<double>{0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  try {
    const std::vector<std::optional<double>> pool{std::nullopt};
    mobilization_cost(std::vector<int>{1}, std::vector<double>{1}, pool);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingReliability);
  }
}

TEST(SortTaskRequests, OrderAndTies) {
  std::vector<TaskTypeSpec> one{{.id = 0, .requirements = {1}}};
  TaskRequestBatch b1{{2}, {1.0}, 0.0};
  EXPECT_EQ(sort_task_requests(b1, std::vector<double>{4.0}, one), std::vector<int>{0});

  std::vector<TaskTypeSpec> two{{.id = 0, .requirements = {1}}, {.id = 1, .requirements = {1}}};
  TaskRequestBatch b2{{1, 1}, {1.0, 1.0}, 0.0};
  EXPECT_EQ(sort_task_requests(b2, std::vector<double>{3.0}, two), (std::vector<int>{0, 1}));

  // keys 3.0 for type 0 and -1.0 for type 1
  std::vector<TaskTypeSpec> keyed{{.id = 0, .requirements = {3, 0}}, {.id = 1, .requirements = {0, 1}}};
  EXPECT_EQ(sort_task_requests(b2, std::vector<double>{1.0, -1.0}, keyed), (std::vector<int>{1, 0}));
}

TEST(PlanMobilization, NoShortfallMeansNoMobilization) {
  auto cfg = single_skill_config(1, 5, 1.0, 3, 10.0);
  std::vector<Worker> roster;
  for (int i = 0; i < 5; ++i) roster.push_back(make_worker(i, 0, 0.6, Presence::logged_in));
  roster.push_back(make_worker(5, 0, 0.9));
  const auto plan = plan_mobilization(state_for(cfg, roster), roster, batch_of(cfg, {3}), cfg);
  EXPECT_EQ(plan.a, std::vector<int>{0});
  EXPECT_EQ(plan.served, std::vector<int>{1});
}

TEST(PlanMobilization, ZeroBudgetBlocksService) {
  auto cfg = single_skill_config(1, 5, 1.0, 3, 0.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.9), make_worker(1, 0, 0.8)};
  const auto plan = plan_mobilization(state_for(cfg, roster), roster, batch_of(cfg, {2}), cfg);
  EXPECT_EQ(plan.a, std::vector<int>{0});
  EXPECT_EQ(plan.served, std::vector<int>{0});
}

TEST(PlanMobilization, PicksMostReliableEligibleWorkers) {
  auto cfg = single_skill_config(1, 5, 2.0, 3, 5.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.3), make_worker(1, 0, 0.8), make_worker(2, 0, 0.9)};
  const auto state = state_for(cfg, roster);
  const auto batch = batch_of(cfg, {2});
  const auto plan = plan_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(plan.a, std::vector<int>{2});
  EXPECT_EQ(plan.served, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(plan.total_cost, 4.0);
  ASSERT_EQ(plan.mobilized[0].size(), 2u);
  EXPECT_EQ(plan.mobilized[0][0].id, 2);
  EXPECT_EQ(plan.mobilized[0][1].id, 1);

  const auto oracle = brute_force_mobilization(state, roster, batch, cfg, plan.served);
  ASSERT_TRUE(oracle.found);
  const auto pool = pool_reliabilities(roster, 1, cfg.epsilon);
  const auto scores = mobilization_scores(state.q, cfg.rho, cfg.mobilization_cost, pool);
  EXPECT_EQ(oracle.best_a, plan.a);
  EXPECT_DOUBLE_EQ(oracle.best_objective, plan_objective(plan.a, scores));
}

TEST(PlanMobilization, RollbackRefundsBudget) {
  // Type 0 needs 3 workers but only 2 are mobilizable; type 1 needs 1.
  MarketConfig cfg = single_skill_config(3, 1, 1.0, 2, 10.0);
  cfg.task_types.push_back({.id = 1, .requirements = {1}, .price = 1.0, .demand_cap = 1, .positive_ratings = 4});
  std::vector<Worker> roster{make_worker(0, 0, 0.9), make_worker(1, 0, 0.8)};
  const auto state = state_for(cfg, roster);
  const auto batch = batch_of(cfg, {1, 1});

  const auto plan = plan_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(plan.served, (std::vector<int>{0, 1}));
  EXPECT_EQ(plan.a, std::vector<int>{1});

  cfg.rollback_on_infeasible = false;
  const auto kept = plan_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(kept.served, (std::vector<int>{0, 1}));
  EXPECT_EQ(kept.a, std::vector<int>{2});
  EXPECT_TRUE(plan_violations(kept, state, roster, batch, cfg).empty());
}

TEST(PlanMobilization, ExplanationsPerSkillPerType) {
  const auto cfg = default_config();
  Rng rng(cfg.seed);
  const auto world = make_world(cfg, rng);
  const auto state = state_for(cfg, world.roster);
  const auto plan = plan_mobilization(state, world.roster, batch_of(cfg, {3, 2}), cfg);
  // type 0 uses 2 skills, type 1 uses 1, plus one summary line per type
  EXPECT_EQ(plan.explanations.size(), 5u);
  for (const auto& line : plan.explanations) EXPECT_EQ(line.rfind("type ", 0), 0u);
}

TEST(PlanMobilization, SafetyOnRandomInstances) {
  for (std::uint64_t s = 0; s < 2000; ++s) {
    auto inst = random_tiny_instance(1000 + s);
    inst.cfg.rollback_on_infeasible = s % 3 != 0;
    const auto plan = plan_mobilization(inst.state, inst.roster, inst.batch, inst.cfg);
    const auto v = plan_violations(plan, inst.state, inst.roster, inst.batch, inst.cfg);
    EXPECT_TRUE(v.empty()) << "seed " << s << ": " << v.front();
    EXPECT_LE(plan.total_cost, inst.batch.budget);
  }
}

TEST(PlanMobilization, DeterministicPlans) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto inst = random_tiny_instance(s);
    EXPECT_EQ(plan_mobilization(inst.state, inst.roster, inst.batch, inst.cfg),
              plan_mobilization(inst.state, inst.roster, inst.batch, inst.cfg));
  }
}

TEST(PlanMobilization, SingleTypeBudgetMonotonicity) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto inst = random_tiny_instance(5000 + s);
    inst.cfg.task_types.resize(1);
    inst.batch.demand.resize(1);
    inst.batch.price.resize(1);
    bool was_served = false;
    for (double b = 0.0; b <= 12.0; b += 0.5) {
      inst.batch.budget = b;
      const bool served = plan_mobilization(inst.state, inst.roster, inst.batch, inst.cfg).served[0] == 1;
      EXPECT_FALSE(was_served && !served) << "seed " << s << " budget " << b;
      was_served = was_served || served;
    }
  }
}

// With two types competing for one budget, a larger budget can let the first type through and
// starve the second.
TEST(PlanMobilization, BudgetIncreaseCanUnserveALaterType) {
  MarketConfig cfg = single_skill_config(2, 1, 1.0, 3, 1.0);
  cfg.task_types.push_back({.id = 1, .requirements = {1}, .price = 1.0, .demand_cap = 1, .positive_ratings = 4});
  std::vector<Worker> roster{make_worker(0, 0, 0.9), make_worker(1, 0, 0.8), make_worker(2, 0, 0.7)};
  const auto state = state_for(cfg, roster);
  auto batch = batch_of(cfg, {1, 1});

  batch.budget = 1.0;
  const auto low = plan_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(low.served, (std::vector<int>{0, 1}));
  batch.budget = 2.0;
  const auto high = plan_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(high.served, (std::vector<int>{1, 0}));
}

TEST(PlanMobilization, LowReputationWorkerNeverMobilized) {
  auto cfg = single_skill_config(1, 5, 0.1, 3, 100.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.315), make_worker(1, 0, 0.6)};
  const auto one = plan_mobilization(state_for(cfg, roster), roster, batch_of(cfg, {1}), cfg);
  EXPECT_EQ(one.served, std::vector<int>{1});
  ASSERT_EQ(one.mobilized[0].size(), 1u);
  EXPECT_EQ(one.mobilized[0][0].id, 1);
  // Two tasks would need the 0.315 worker too, so the type is rolled back instead.
  const auto two = plan_mobilization(state_for(cfg, roster), roster, batch_of(cfg, {2}), cfg);
  EXPECT_EQ(two.a, std::vector<int>{0});
  EXPECT_EQ(two.served, std::vector<int>{0});
}

TEST(AssembleTeams, ForcedAssignment) {
  MarketConfig cfg;
  cfg.skills = 2;
  cfg.task_types = {{.id = 0, .requirements = {1, 1}, .price = 1.0, .demand_cap = 1, .positive_ratings = 1}};
  cfg.mobilization_cost = {1, 1};
  cfg.mobilization_cap = {0, 0};
  cfg.arrival_rates = {0, 0};
  std::vector<Worker> roster{make_worker(0, 0, 0.6, Presence::logged_in), make_worker(1, 1, 0.7, Presence::logged_in)};
  const auto batch = batch_of(cfg, {1});
  const auto plan = plan_mobilization(state_for(cfg, roster), roster, batch, cfg);
  const auto teams = assemble_teams(plan, roster, batch, cfg);
  ASSERT_EQ(teams.teams.size(), 1u);
  EXPECT_EQ(teams.teams[0].members, (std::vector<TeamMember>{{0, SkillId{0}}, {1, SkillId{1}}}));
}

TEST(AssembleTeams, UnservedTypeAbsent) {
  auto cfg = single_skill_config(1, 3, 1.0, 0, 0.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.9, Presence::logged_in)};
  const auto batch = batch_of(cfg, {2});
  const auto plan = plan_mobilization(state_for(cfg, roster), roster, batch, cfg);
  EXPECT_EQ(plan.served, std::vector<int>{0});
  EXPECT_TRUE(assemble_teams(plan, roster, batch, cfg).teams.empty());
}

TEST(AssembleTeams, HighestReliabilityFirst) {
  auto cfg = single_skill_config(1, 3, 1.0, 0, 0.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.6, Presence::logged_in), make_worker(1, 0, 0.8, Presence::logged_in),
                             make_worker(2, 0, 0.9, Presence::logged_in), make_worker(3, 0, 0.7, Presence::logged_in)};
  const auto batch = batch_of(cfg, {3});
  const auto plan = plan_mobilization(state_for(cfg, roster), roster, batch, cfg);
  const auto teams = assemble_teams(plan, roster, batch, cfg);
  std::set<WorkerId> used;
  for (const auto& t : teams.teams)
    for (const auto& m : t.members) used.insert(m.id);
  EXPECT_EQ(used, (std::set<WorkerId>{1, 2, 3}));
}

TEST(AssembleTeams, NeverUsesIneligibleWorkers) {
  auto cfg = single_skill_config(1, 3, 1.0, 2, 10.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.315, Presence::logged_in), make_worker(1, 0, 0.8, Presence::logged_in),
                             make_worker(2, 0, 0.315), make_worker(3, 0, 0.6)};
  const auto batch = batch_of(cfg, {2});
  const auto plan = plan_mobilization(state_for(cfg, roster), roster, batch, cfg);
  EXPECT_EQ(plan.served, std::vector<int>{1});
  const auto teams = assemble_teams(plan, roster, batch, cfg);
  for (const auto& t : teams.teams)
    for (const auto& m : t.members) EXPECT_TRUE(m.id == 1 || m.id == 3);
}

TEST(AssembleTeams, InconsistentPlanThrows) {
  auto cfg = single_skill_config(1, 3, 1.0, 0, 0.0);
  std::vector<Worker> roster{make_worker(0, 0, 0.9, Presence::logged_in)};
  const auto batch = batch_of(cfg, {2});
  MobilizationPlan bogus;
  bogus.a = {0};
  bogus.served = {1};
  bogus.mobilized = {{}};
  try {
    assemble_teams(bogus, roster, batch, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InternalInconsistency);
  }
}

TEST(PlanMobilization, ZeroDemandTypeIsNotServed) {
  MarketConfig cfg = single_skill_config(1, 3, 1.0, 2, 10.0);
  cfg.task_types.push_back({.id = 1, .requirements = {1}, .price = 1.0, .demand_cap = 3, .positive_ratings = 4});
  std::vector<Worker> roster{make_worker(0, 0, 0.9, Presence::logged_in), make_worker(1, 0, 0.8)};
  const auto state = state_for(cfg, roster);
  const auto batch = batch_of(cfg, {0, 1});
  const auto plan = plan_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(plan.served, (std::vector<int>{0, 1}));
  EXPECT_FALSE(make_plan(std::vector<int>{0}, std::vector<int>{1, 1}, state, roster, batch, cfg).has_value());
  const auto res = brute_force_mobilization(state, roster, batch, cfg);
  EXPECT_EQ(res.served_set[0], 0);
}
