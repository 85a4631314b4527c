#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"
#include "crowdasm/scheduler.hpp"
#include "crowdasm/simulator.hpp"

namespace crowdasm {

struct OracleResult {
  bool found = false;
  std::vector<int> best_a;
  double best_objective = std::numeric_limits<double>::infinity();
  long evaluated_count = 0;  // size of the enumerated cap box
  long feasible_count = 0;   // (a, served set) pairs satisfying every constraint
  std::vector<int> served_set;
};

namespace detail {

/// Calls fn(a) for every a in [0, caps] in lexicographic order (last skill fastest).
template <class Fn>
void for_each_box_vector(std::span<const int> caps, Fn&& fn) {
  std::vector<int> a(caps.size(), 0);
  while (true) {
    fn(std::as_const(a));
    int m = static_cast<int>(caps.size()) - 1;
    while (m >= 0 && a[m] == caps[m]) a[m--] = 0;
    if (m < 0) return;
    ++a[m];
  }
}

inline long box_size(std::span<const int> caps) {
  long n = 1;
  for (int c : caps) {
    n *= static_cast<long>(c) + 1;
    if (n > 1'000'000'000L) return n;
  }
  return n;
}

inline std::vector<int> mask_to_set(unsigned mask, int K) {
  std::vector<int> s(K, 0);
  for (int k = 0; k < K; ++k) s[k] = (mask >> k) & 1U;
  return s;
}

inline long skill_need(const MarketConfig& cfg, const TaskRequestBatch& batch, std::span<const int> served, int m) {
  long need = 0;
  for (int k = 0; k < cfg.num_types(); ++k)
    if (served[k]) need += static_cast<long>(cfg.task_types[k].required(m)) * batch.demand[k];
  return need;
}

}  // namespace detail

/// Exhaustive minimum of sum a_m * score_m over every a in the cap box that respects the eligible
/// offline pool, the budget, and the service semantics: the served set must be staffable from
/// logged-in plus mobilized workers, and no mobilized worker may be left without a task.
/// With `target`, only that served set is considered. Ties keep the lexicographically smallest a.
inline OracleResult brute_force_mobilization(const SkillQueueState& state, std::span<const Worker> roster,
                                             const TaskRequestBatch& batch, const MarketConfig& cfg,
                                             std::optional<std::vector<int>> target = std::nullopt) {
  const int M = cfg.skills;
  const int K = cfg.num_types();
  const long box = detail::box_size(cfg.mobilization_cap);
  if (box > 1'000'000L) throw Error(ErrorCode::SearchSpaceTooLarge, "cap box exceeds 1e6 vectors");

  const auto pool = pool_reliabilities(roster, M, cfg.epsilon);
  const auto scores = mobilization_scores(state.q, cfg.rho, cfg.mobilization_cost, pool);

  std::vector<std::vector<int>> sets;
  if (target) {
    sets.push_back(*target);
  } else {
    for (unsigned mask = 0; mask < (1U << K); ++mask) sets.push_back(detail::mask_to_set(mask, K));
  }
  std::vector<std::vector<long>> need(sets.size(), std::vector<long>(M));
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (int m = 0; m < M; ++m) need[s][m] = detail::skill_need(cfg, batch, sets[s], m);

  OracleResult res;
  detail::for_each_box_vector(cfg.mobilization_cap, [&](const std::vector<int>& a) {
    ++res.evaluated_count;
    for (int m = 0; m < M; ++m)
      if (a[m] > state.offline_eligible[m]) return;
    if (mobilization_spend(a, cfg.mobilization_cost) > batch.budget) return;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      bool ok = !detail::serves_empty_type(sets[s], batch);
      for (int m = 0; m < M && ok; ++m) {
        const long shortfall = std::max(0L, need[s][m] - state.logged_in[m]);
        ok = a[m] >= shortfall && a[m] <= shortfall;
      }
      if (!ok) continue;
      ++res.feasible_count;
      const double obj = plan_objective(a, scores);
      if (!res.found || obj < res.best_objective) {
        res.found = true;
        res.best_objective = obj;
        res.best_a = a;
        res.served_set = sets[s];
      }
    }
  });
  return res;
}

// ---------------------------------------------------------------------------
// Per-step decisions shared by the horizon search and the myopic policy

struct StepDecision {
  std::vector<int> a;
  std::vector<int> served;
};

/// Every (a, served set) pair that passes make_plan, in lexicographic a then ascending mask order.
inline std::vector<StepDecision> feasible_decisions(const PlanningView& v) {
  const int M = v.cfg.skills;
  const int K = v.cfg.num_types();
  std::vector<int> caps(M);
  for (int m = 0; m < M; ++m) caps[m] = std::min(v.cfg.mobilization_cap[m], v.state.offline_eligible[m]);
  std::vector<StepDecision> out;
  detail::for_each_box_vector(caps, [&](const std::vector<int>& a) {
    if (mobilization_spend(a, v.cfg.mobilization_cost) > v.batch.budget) return;
    for (unsigned mask = 0; mask < (1U << K); ++mask) {
      auto served = detail::mask_to_set(mask, K);
      bool ok = !detail::serves_empty_type(served, v.batch);
      for (int m = 0; m < M && ok; ++m) ok = detail::skill_need(v.cfg, v.batch, served, m) <= v.state.logged_in[m] + a[m];
      if (ok) out.push_back({a, std::move(served)});
    }
  });
  return out;
}

inline MobilizationPlan plan_for(const StepDecision& d, const PlanningView& v) {
  auto plan = make_plan(d.a, d.served, v.state, v.roster, v.batch, v.cfg);
  if (!plan) throw Error(ErrorCode::InternalInconsistency, "decision rejected by make_plan");
  return *plan;
}

// ---------------------------------------------------------------------------
// Baselines

inline Policy never_policy() {
  return [](const PlanningView& v, Rng&) {
    std::vector<int> a(v.cfg.skills, 0);
    std::vector<int> order(v.cfg.num_types());
    std::iota(order.begin(), order.end(), 0);
    const auto served = greedy_service(a, order, v.state, v.batch, v.cfg);
    return *make_plan(a, served, v.state, v.roster, v.batch, v.cfg);
  };
}

/// Fills each skill to its cap (or the eligible pool) in skill order while budget lasts.
inline Policy max_policy() {
  return [](const PlanningView& v, Rng&) {
    const int M = v.cfg.skills;
    std::vector<int> a(M, 0);
    for (int m = 0; m < M; ++m) {
      const int limit = std::min(v.cfg.mobilization_cap[m], v.state.offline_eligible[m]);
      while (a[m] < limit) {
        ++a[m];
        if (mobilization_spend(a, v.cfg.mobilization_cost) > v.batch.budget) {
          --a[m];
          break;
        }
      }
    }
    std::vector<int> order(v.cfg.num_types());
    std::iota(order.begin(), order.end(), 0);
    const auto served = greedy_service(a, order, v.state, v.batch, v.cfg);
    return *make_plan(a, served, v.state, v.roster, v.batch, v.cfg);
  };
}

/// Uniform draw over the budget-feasible cap box by rejection; falls back to a = 0 after 10000 misses.
inline Policy random_policy() {
  return [](const PlanningView& v, Rng& rng) {
    const int M = v.cfg.skills;
    std::vector<int> a(M, 0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      std::vector<int> trial(M);
      for (int m = 0; m < M; ++m) {
        const int limit = std::min(v.cfg.mobilization_cap[m], v.state.offline_eligible[m]);
        trial[m] = std::uniform_int_distribution<int>(0, limit)(rng);
      }
      if (mobilization_spend(trial, v.cfg.mobilization_cost) <= v.batch.budget) {
        a = std::move(trial);
        break;
      }
    }
    std::vector<int> order(v.cfg.num_types());
    std::iota(order.begin(), order.end(), 0);
    const auto served = greedy_service(a, order, v.state, v.batch, v.cfg);
    return *make_plan(a, served, v.state, v.roster, v.batch, v.cfg);
  };
}

/// Myopic optimum: the feasible decision with the largest single-step profit.
inline Policy oracle_step_policy() {
  return [](const PlanningView& v, Rng&) {
    const auto pool = pool_reliabilities(v.roster, v.cfg.skills, v.cfg.epsilon);
    const auto decisions = feasible_decisions(v);
    const StepDecision* best = nullptr;
    double best_profit = -std::numeric_limits<double>::infinity();
    for (const auto& d : decisions) {
      const double cost = mobilization_cost(d.a, v.cfg.mobilization_cost, pool);
      const double profit = step_profit(d.served, v.expected_demand, v.batch.price, cost);
      if (profit > best_profit) {
        best_profit = profit;
        best = &d;
      }
    }
    return plan_for(*best, v);
  };
}

inline Policy make_policy(const std::string& name) {
  if (name == "crowdasm") return crowdasm_policy();
  if (name == "never") return never_policy();
  if (name == "max") return max_policy();
  if (name == "random") return random_policy();
  if (name == "oracle-step") return oracle_step_policy();
  throw Error(ErrorCode::UnknownPolicy, "unknown policy '" + name + "'");
}

inline SimulationTrace run(const MarketConfig& cfg, const std::string& policy_name) {
  return run_with(cfg, make_policy(policy_name), policy_name);
}

// ---------------------------------------------------------------------------
// Horizon-optimal profit on scripted instances

struct HorizonOptimum {
  double average = 0.0;
  double total = 0.0;
  long nodes = 0;        // distinct (t, world) states expanded
  double space_bound = 0;  // per-step decision bound raised to the horizon
};

namespace detail {

inline std::string world_key(const World& w, int t) {
  std::string key = std::to_string(t) + "|";
  for (const auto& wk : w.roster) {
    key += std::to_string(static_cast<int>(wk.presence)) + "," + std::to_string(wk.busy_until.value_or(-1)) + "," +
           std::to_string(wk.history.successes) + "," + std::to_string(wk.history.failures) + ";";
  }
  key += "|";
  for (const auto& a : w.active) {
    key += std::to_string(a.task_type) + ":" + std::to_string(a.finish);
    for (auto id : a.members) key += "," + std::to_string(id);
    key += ";";
  }
  return key;
}

}  // namespace detail

/// Best achievable time-averaged profit over every sequence of feasible per-step decisions.
/// Requires deterministic dynamics: deterministic demand, an arrival script, and no random outcomes.
inline HorizonOptimum horizon_optimal(const MarketConfig& raw_cfg, double space_limit = 1e7) {
  const MarketConfig cfg = validate_config(raw_cfg);
  if (cfg.demand_mode != DemandMode::deterministic || !cfg.arrival_script ||
      cfg.outcome_model == OutcomeModel::bernoulli)
    throw Error(ErrorCode::DomainError,
                "horizon search needs deterministic demand, scripted arrivals and non-random outcomes");

  const int K = cfg.num_types();
  const double per_step = static_cast<double>(detail::box_size(cfg.mobilization_cap)) * std::pow(2.0, K);
  HorizonOptimum out;
  out.space_bound = std::pow(per_step, cfg.horizon);
  if (out.space_bound > space_limit)
    throw Error(ErrorCode::SearchSpaceTooLarge, "decision sequence space exceeds the search limit");
  if (cfg.horizon == 0) return out;

  Rng rng(cfg.seed);
  World start = make_world(cfg, rng);
  std::unordered_map<std::string, double> memo;

  std::function<double(const World&, int)> best_from = [&](const World& w, int t) -> double {
    if (t == cfg.horizon) return 0.0;
    const auto key = detail::world_key(w, t);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ++out.nodes;

    std::vector<StepDecision> decisions;
    {
      World probe = w;
      Rng r(0);
      step(probe, cfg,
           [&](const PlanningView& v, Rng&) {
             decisions = feasible_decisions(v);
             return plan_for(decisions.front(), v);
           },
           r, t);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : decisions) {
      World next = w;
      Rng r(0);
      const auto led = step(next, cfg, [&](const PlanningView& v, Rng&) { return plan_for(d, v); }, r, t);
      best = std::max(best, led.expected_profit + best_from(next, t + 1));
    }
    memo.emplace(key, best);
    return best;
  };

  out.total = best_from(start, 0);
  out.average = out.total / cfg.horizon;
  return out;
}

inline double horizon_optimal_profit(const MarketConfig& cfg) { return horizon_optimal(cfg).average; }

}  // namespace crowdasm
