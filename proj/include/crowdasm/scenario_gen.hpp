#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crowdasm/domain.hpp"
#include "crowdasm/reputation.hpp"
#include "crowdasm/scheduler.hpp"

namespace crowdasm {

struct ScenarioLimits {
  int max_skills = 4;
  int max_types = 3;
  int horizon = 200;
  int max_requirement = 2;
  int max_demand_cap = 4;
  int max_mobilization_cap = 4;
  int max_initial_workers = 8;
};

namespace detail {
template <class Rng>
double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
template <class Rng>
int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class Rng>
std::vector<TaskTypeSpec> random_types(Rng& rng, int M, int K, int max_req, int max_cap, int max_service) {
  std::vector<TaskTypeSpec> types;
  for (int k = 0; k < K; ++k) {
    TaskTypeSpec tt;
    tt.id = k;
    tt.requirements.assign(M, 0);
    for (int m = 0; m < M; ++m) tt.requirements[m] = uniform_int(rng, 0, max_req);
    tt.requirements[uniform_int(rng, 0, M - 1)] = uniform_int(rng, 1, max_req);
    tt.price = uniform_real(rng, 0.5, 4.0);
    tt.demand_cap = uniform_int(rng, 0, max_cap);
    tt.positive_ratings = uniform_int(rng, 1, 30);
    tt.service_time = uniform_int(rng, 1, max_service);
    types.push_back(std::move(tt));
  }
  return types;
}
}  // namespace detail

/// Random stochastic scenario for property checks.
inline MarketConfig random_scenario(std::uint64_t seed, const ScenarioLimits& lim = {}) {
  std::mt19937_64 rng(seed);
  MarketConfig cfg;
  const int M = detail::uniform_int(rng, 1, lim.max_skills);
  const int K = detail::uniform_int(rng, 1, lim.max_types);
  cfg.skills = M;
  cfg.task_types = detail::random_types(rng, M, K, lim.max_requirement, lim.max_demand_cap, 3);
  cfg.alpha1 = detail::uniform_real(rng, -0.5, 1.5);
  cfg.alpha2 = -detail::uniform_real(rng, 0.05, 1.0);
  cfg.alpha3 = detail::uniform_real(rng, 0.05, 0.5);
  cfg.epsilon = detail::uniform_real(rng, 0.3, 0.7);
  cfg.rho = detail::uniform_real(rng, 0.1, 10.0);
  cfg.horizon = lim.horizon;
  cfg.seed = rng();
  cfg.demand_mode = detail::uniform_int(rng, 0, 1) ? DemandMode::poisson : DemandMode::deterministic;
  cfg.demand_form = detail::uniform_int(rng, 0, 3) == 0 ? DemandForm::linearized_eq12 : DemandForm::exact_eq5;
  cfg.outcome_model = OutcomeModel::bernoulli;
  cfg.rollback_on_infeasible = detail::uniform_int(rng, 0, 4) != 0;
  cfg.budget_per_step = {detail::uniform_real(rng, 0.0, 15.0)};
  GeneratedWorkers gw;
  gw.max_history = detail::uniform_int(rng, 0, 12);
  for (int m = 0; m < M; ++m) {
    cfg.mobilization_cost.push_back(detail::uniform_real(rng, 0.5, 3.0));
    cfg.mobilization_cap.push_back(detail::uniform_int(rng, 0, lim.max_mobilization_cap));
    cfg.arrival_rates.push_back(detail::uniform_real(rng, 0.0, 1.0));
    gw.logged_in.push_back(detail::uniform_int(rng, 0, lim.max_initial_workers));
    gw.offline.push_back(detail::uniform_int(rng, 0, lim.max_initial_workers * 2));
  }
  cfg.generated_workers = gw;
  return cfg;
}

/// One planning snapshot: a config plus roster, queue state and request batch.
struct TinyInstance {
  MarketConfig cfg;
  std::vector<Worker> roster;
  SkillQueueState state;
  TaskRequestBatch batch;
};

/// Small instance with M <= 3, caps <= 3, K <= 2 and T_k <= 3.
inline TinyInstance random_tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TinyInstance inst;
  auto& cfg = inst.cfg;
  const int M = detail::uniform_int(rng, 1, 3);
  const int K = detail::uniform_int(rng, 1, 2);
  cfg.skills = M;
  cfg.task_types = detail::random_types(rng, M, K, 2, 3, 1);
  cfg.epsilon = detail::uniform_real(rng, 0.3, 0.7);
  cfg.rho = detail::uniform_real(rng, 0.05, 10.0);
  cfg.horizon = 1;
  for (int m = 0; m < M; ++m) {
    cfg.mobilization_cost.push_back(detail::uniform_int(rng, 1, 6) * 0.5);
    cfg.mobilization_cap.push_back(detail::uniform_int(rng, 0, 3));
    cfg.arrival_rates.push_back(0.0);
  }
  cfg.budget_per_step = {detail::uniform_int(rng, 0, 24) * 0.5};
  cfg.generated_workers.reset();
  cfg.workers.clear();

  for (int m = 0; m < M; ++m) {
    const int logged = detail::uniform_int(rng, 0, 4);
    const int offline = detail::uniform_int(rng, 0, 5);
    for (int i = 0; i < logged + offline; ++i) {
      Worker w;
      w.id = static_cast<WorkerId>(inst.roster.size());
      w.skill = SkillId{m};
      w.history = {detail::uniform_int(rng, 0, 6), detail::uniform_int(rng, 0, 6)};
      w.presence = i < logged ? Presence::logged_in : Presence::offline;
      inst.roster.push_back(w);
    }
  }
  std::vector<int> q(M, 0);
  for (const auto& w : inst.roster)
    if (w.presence == Presence::logged_in) ++q[w.skill.index];
  inst.state = queue_state(q, inst.roster, M, cfg.epsilon);
  inst.batch.budget = cfg.budget_per_step.front();
  for (const auto& tt : cfg.task_types) {
    inst.batch.demand.push_back(detail::uniform_int(rng, 0, 3));
    inst.batch.price.push_back(tt.price);
  }
  return inst;
}

}  // namespace crowdasm
