#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"

using namespace crowdasm;

TEST(ValidateConfig, DefaultsAreAccepted) {
  const auto cfg = default_config();
  EXPECT_NO_THROW(validate_config(cfg));
  EXPECT_EQ(cfg.skills, 2);
  EXPECT_EQ(cfg.num_types(), 2);
  EXPECT_DOUBLE_EQ(cfg.alpha2, -0.5);
  EXPECT_DOUBLE_EQ(cfg.alpha3, 0.25);
  EXPECT_DOUBLE_EQ(cfg.rho, 1.0);
}

TEST(ValidateConfig, PositiveAlpha2IsRejected) {
  auto cfg = default_config();
  cfg.alpha2 = 0.5;
  try {
    validate_config(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(e.has(ErrorCode::BadAlphaSigns));
  }
}

TEST(ValidateConfig, EmptyRequirementsAreRejected) {
  auto cfg = default_config();
  cfg.task_types[1].requirements = {0, 0};
  try {
    validate_config(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(e.has(ErrorCode::EmptyRequirements));
  }
}

TEST(ValidateConfig, ListsEveryViolation) {
  auto cfg = default_config();
  cfg.rho = 0.0;
  cfg.epsilon = 1.5;
  cfg.task_types[0].price = -1.0;
  cfg.mobilization_cost = {1.0};
  try {
    validate_config(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(e.has(ErrorCode::NonPositiveRho));
    EXPECT_TRUE(e.has(ErrorCode::BadEpsilon));
    EXPECT_TRUE(e.has(ErrorCode::NegativePrice));
    EXPECT_TRUE(e.has(ErrorCode::LengthMismatch));
    EXPECT_GE(e.violations().size(), 4u);
  }
}

TEST(ValidateConfig, WorkersCannotStartBusy) {
  auto cfg = default_config();
  cfg.workers = {WorkerSpec{.skill = 0, .presence = Presence::busy, .successes = 0, .failures = 0}};
  EXPECT_THROW(validate_config(cfg), ConfigError);
}

TEST(ValidateConfig, IsIdempotentOnRandomScenarios) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto cfg = random_scenario(s);
    const auto once = validate_config(cfg);
    EXPECT_EQ(validate_config(once), once);
  }
}

TEST(BudgetSchedule, LastEntryRepeats) {
  MarketConfig cfg;
  cfg.budget_per_step = {3.0, 1.0, 4.0};
  EXPECT_DOUBLE_EQ(cfg.budget_at(0), 3.0);
  EXPECT_DOUBLE_EQ(cfg.budget_at(2), 4.0);
  EXPECT_DOUBLE_EQ(cfg.budget_at(99), 4.0);
}

TEST(MuMax, SingleProduct) {
  std::vector<TaskTypeSpec> tt{{.id = 0, .requirements = {2}, .price = 1, .demand_cap = 3}};
  EXPECT_EQ(compute_mu_max(tt, 1), std::vector<int>{6});
}

TEST(MuMax, SumsOverTypes) {
  std::vector<TaskTypeSpec> tt{{.id = 0, .requirements = {1}, .price = 1, .demand_cap = 2},
                               {.id = 1, .requirements = {2}, .price = 1, .demand_cap = 2}};
  EXPECT_EQ(compute_mu_max(tt, 1), std::vector<int>{6});
}

TEST(MuMax, ZeroCapsGiveZeros) {
  std::vector<TaskTypeSpec> tt{{.id = 0, .requirements = {1, 3}, .price = 1, .demand_cap = 0}};
  EXPECT_EQ(compute_mu_max(tt, 2), (std::vector<int>{0, 0}));
}

TEST(MuMax, AdditiveOverTypeSets) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const auto cfg = random_scenario(rng());
    const auto split = static_cast<std::size_t>(rng() % (cfg.task_types.size() + 1));
    std::vector<TaskTypeSpec> a(cfg.task_types.begin(), cfg.task_types.begin() + split);
    std::vector<TaskTypeSpec> b(cfg.task_types.begin() + split, cfg.task_types.end());
    const auto whole = compute_mu_max(cfg.task_types, cfg.skills);
    const auto ma = compute_mu_max(a, cfg.skills);
    const auto mb = compute_mu_max(b, cfg.skills);
    for (int m = 0; m < cfg.skills; ++m) EXPECT_EQ(whole[m], ma[m] + mb[m]);
  }
}

TEST(Xi, HandValues) {
  EXPECT_DOUBLE_EQ(compute_xi(std::vector<int>{0}, std::vector<int>{0}), 0.0);
  EXPECT_DOUBLE_EQ(compute_xi(std::vector<int>{2}, std::vector<int>{3}), 6.5);
  EXPECT_DOUBLE_EQ(compute_xi(std::vector<int>{1, 1}, std::vector<int>{2, 2}), 5.0);
}

TEST(Xi, LengthMismatchThrows) {
  try {
    compute_xi(std::vector<int>{1, 2}, std::vector<int>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Xi, PermutationInvariantAndMonotone) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> d(0, 20);
  for (int rep = 0; rep < 200; ++rep) {
    const int M = 1 + static_cast<int>(rng() % 5);
    std::vector<int> a(M), mu(M);
    for (int m = 0; m < M; ++m) {
      a[m] = d(rng);
      mu[m] = d(rng);
    }
    const double base = compute_xi(a, mu);
    std::vector<int> idx(M);
    for (int m = 0; m < M; ++m) idx[m] = m;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> pa(M), pmu(M);
    for (int m = 0; m < M; ++m) {
      pa[m] = a[idx[m]];
      pmu[m] = mu[idx[m]];
    }
    EXPECT_DOUBLE_EQ(compute_xi(pa, pmu), base);
    const int j = static_cast<int>(rng() % M);
    auto bigger = a;
    ++bigger[j];
    EXPECT_GT(compute_xi(bigger, mu), base);
    auto bigger_mu = mu;
    ++bigger_mu[j];
    EXPECT_GT(compute_xi(a, bigger_mu), base);
  }
}

TEST(Xi, FromConfig) {
  const auto cfg = default_config();
  // mu_max = (1*3, 1*3 + 2*2) = (3, 7); a_max = (3, 3)
  EXPECT_DOUBLE_EQ(compute_xi(cfg), 0.5 * (9 + 9 + 9 + 49));
}
