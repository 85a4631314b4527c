#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"
#include "crowdasm/reputation.hpp"

namespace crowdasm {

struct TaskRequestBatch {
  std::vector<int> demand;    // realized T_k(t)
  std::vector<double> price;  // p_k(t)
  double budget = 0.0;        // B(t)
};

struct MobilizedWorker {
  WorkerId id = 0;
  double reliability = 0.0;  // at the moment of mobilization
  friend bool operator==(const MobilizedWorker&, const MobilizedWorker&) = default;
};

struct MobilizationPlan {
  std::vector<int> a;                                  // per skill
  std::vector<int> served;                             // d_k in {0,1}
  std::vector<std::vector<MobilizedWorker>> mobilized;  // per skill, in selection order
  std::vector<int> order;                              // task types in processing order
  double total_cost = 0.0;                             // sum c_m a_m
  double scored_cost = 0.0;                            // sum c_m a_m / r_m
  std::vector<std::string> explanations;

  friend bool operator==(const MobilizationPlan&, const MobilizationPlan&) = default;
};

struct TeamMember {
  WorkerId id = 0;
  SkillId skill;
  friend bool operator==(const TeamMember&, const TeamMember&) = default;
};

struct Team {
  int task_type = 0;
  int instance = 0;
  std::vector<TeamMember> members;
  friend bool operator==(const Team&, const Team&) = default;
};

struct TeamAssignment {
  std::vector<Team> teams;
};

// ---------------------------------------------------------------------------
// Scoring and cost

/// q_m - rho * c_m / r_m. Lower scores are mobilized first.
inline double mobilization_score(int q_m, double rho, double c_m, double r_tilde_m) {
  if (!(r_tilde_m > 0.0 && r_tilde_m < 1.0))
    throw Error(ErrorCode::DomainError, "pool reliability must lie in (0,1)");
  return static_cast<double>(q_m) - rho * c_m / r_tilde_m;
}

/// Score vector over all skills. A skill with no usable offline pool cannot mobilize, so its
/// cost term is dropped and the score is q_m.
inline std::vector<double> mobilization_scores(std::span<const int> q, double rho,
                                               std::span<const double> c,
                                               std::span<const std::optional<double>> pool) {
  std::vector<double> s(q.size());
  for (std::size_t m = 0; m < q.size(); ++m)
    s[m] = pool[m] ? mobilization_score(q[m], rho, c[m], *pool[m]) : static_cast<double>(q[m]);
  return s;
}

/// Scored mobilization cost: sum over skills of c_m * a_m / r_m.
inline double mobilization_cost(std::span<const int> a, std::span<const double> c,
                                std::span<const std::optional<double>> r_tilde) {
  if (a.size() != c.size() || a.size() != r_tilde.size())
    throw Error(ErrorCode::LengthMismatch, "mobilization_cost vectors differ in length");
  double total = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] == 0) continue;
    if (!r_tilde[m])
      throw Error(ErrorCode::MissingReliability,
                  "skill " + std::to_string(m) + " mobilized without a pool reliability");
    total += c[m] * a[m] / *r_tilde[m];
  }
  return total;
}

inline double mobilization_cost(std::span<const int> a, std::span<const double> c,
                                std::span<const double> r_tilde) {
  std::vector<std::optional<double>> opt(r_tilde.begin(), r_tilde.end());
  return mobilization_cost(a, c, opt);
}

/// Plain spend sum c_m * a_m, accumulated in skill order.
inline double mobilization_spend(std::span<const int> a, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += c[m] * a[m];
  return s;
}

/// Objective minimized per step: sum a_m * score_m.
inline double plan_objective(std::span<const int> a, std::span<const double> scores) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * scores[m];
  return s;
}

/// Task types ascending by sum_m n_{m,k} * score_m; ties by id.
inline std::vector<int> sort_task_requests(const TaskRequestBatch& batch,
                                           std::span<const double> scores,
                                           std::span<const TaskTypeSpec> types) {
  const std::size_t K = std::min(batch.demand.size(), types.size());
  std::vector<double> key(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < scores.size(); ++m) key[k] += types[k].required(static_cast<int>(m)) * scores[m];
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    if (key[x] != key[y]) return key[x] < key[y];
    return x < y;
  });
  return order;
}

// ---------------------------------------------------------------------------
// Roster views

struct Candidate {
  WorkerId id = 0;
  double reliability = 0.0;
};

namespace detail {
inline void sort_candidates(std::vector<Candidate>& v) {
  std::sort(v.begin(), v.end(), [](const Candidate& x, const Candidate& y) {
    if (x.reliability != y.reliability) return x.reliability > y.reliability;
    return x.id < y.id;
  });
}
}  // namespace detail

/// Eligible workers with the given presence, per skill, descending reliability then ascending id.
inline std::vector<std::vector<Candidate>> eligible_by_skill(std::span<const Worker> roster, int skills,
                                                             double epsilon, Presence presence) {
  std::vector<std::vector<Candidate>> out(static_cast<std::size_t>(skills));
  for (const auto& w : roster) {
    if (w.presence != presence) continue;
    const double r = reliability(w);
    if (r < epsilon) continue;
    out[w.skill.index].push_back({w.id, r});
  }
  for (auto& v : out) detail::sort_candidates(v);
  return out;
}

inline std::vector<int> count_presence(std::span<const Worker> roster, int skills, Presence presence) {
  std::vector<int> out(static_cast<std::size_t>(skills), 0);
  for (const auto& w : roster)
    if (w.presence == presence) ++out[w.skill.index];
  return out;
}

/// Snapshot of queue counts; q is supplied by the caller since it is measured before arrivals.
inline SkillQueueState queue_state(std::vector<int> q, std::span<const Worker> roster, int skills,
                                   double epsilon) {
  SkillQueueState s;
  s.q = std::move(q);
  s.logged_in.assign(static_cast<std::size_t>(skills), 0);
  s.offline_eligible.assign(static_cast<std::size_t>(skills), 0);
  for (const auto& w : roster) {
    if (reliability(w) < epsilon) continue;
    if (w.presence == Presence::logged_in) ++s.logged_in[w.skill.index];
    if (w.presence == Presence::offline) ++s.offline_eligible[w.skill.index];
  }
  return s;
}

// ---------------------------------------------------------------------------
// CrowdAsm planner

namespace detail {
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

/// True when `served` flags a type with no realized demand; such a type is never served.
inline bool serves_empty_type(std::span<const int> served, const TaskRequestBatch& batch) {
  for (std::size_t k = 0; k < served.size(); ++k)
    if (served[k] && batch.demand[k] == 0) return true;
  return false;
}

}  // namespace detail

/// Budgeted greedy mobilization. Types are visited in ascending score order; each is served in
/// full or not at all. Logged-in capacity is consumed by earlier served types.
inline MobilizationPlan plan_mobilization(const SkillQueueState& state, std::span<const Worker> roster,
                                          const TaskRequestBatch& batch, const MarketConfig& cfg) {
  const int M = cfg.skills;
  const int K = cfg.num_types();
  const auto pool = pool_reliabilities(roster, M, cfg.epsilon);
  const auto scores = mobilization_scores(state.q, cfg.rho, cfg.mobilization_cost, pool);
  const auto candidates = eligible_by_skill(roster, M, cfg.epsilon, Presence::offline);

  MobilizationPlan plan;
  plan.a.assign(M, 0);
  plan.served.assign(K, 0);
  plan.mobilized.assign(M, {});
  plan.order = sort_task_requests(batch, scores, cfg.task_types);

  std::vector<int> capacity = state.logged_in;
  std::vector<std::size_t> next(M, 0);  // next offline candidate per skill

  for (int k : plan.order) {
    const auto& tt = cfg.task_types[k];
    const int T = batch.demand[k];
    std::vector<int> tentative(M, 0);
    const double spent_before = mobilization_spend(plan.a, cfg.mobilization_cost);

    for (int m = 0; m < M; ++m) {
      const int need = tt.required(m) * T;
      if (tt.required(m) == 0 || capacity[m] >= need) continue;
      const int shortfall = need - capacity[m];
      while (tentative[m] < shortfall && plan.a[m] + tentative[m] < cfg.mobilization_cap[m] &&
             next[m] + tentative[m] < candidates[m].size()) {
        std::vector<int> trial = plan.a;
        for (int j = 0; j < M; ++j) trial[j] += tentative[j];
        ++trial[m];
        if (mobilization_spend(trial, cfg.mobilization_cost) > batch.budget) break;
        ++tentative[m];
      }
    }

    bool feasible = T > 0;
    for (int m = 0; m < M; ++m)
      if (capacity[m] + tentative[m] < tt.required(m) * T) feasible = false;

    const bool commit = feasible || !cfg.rollback_on_infeasible;
    for (int m = 0; m < M; ++m) {
      if (tt.required(m) == 0) continue;
      const int need = tt.required(m) * T;
      std::string line = "type " + std::to_string(k) + " skill " + std::to_string(m) +
                         ": score " + detail::fmt_double(scores[m]) + ", need " + std::to_string(need) +
                         ", available " + std::to_string(capacity[m]) + ", shortfall " +
                         std::to_string(std::max(0, need - capacity[m])) + ", mobilized " +
                         std::to_string(commit ? tentative[m] : 0);
      plan.explanations.push_back(std::move(line));
    }

    if (commit) {
      for (int m = 0; m < M; ++m) {
        for (int i = 0; i < tentative[m]; ++i) {
          const auto& c = candidates[m][next[m]++];
          plan.mobilized[m].push_back({c.id, c.reliability});
        }
        plan.a[m] += tentative[m];
        capacity[m] += tentative[m];
      }
    }
    const double spent = mobilization_spend(plan.a, cfg.mobilization_cost) - spent_before;
    if (feasible) {
      plan.served[k] = 1;
      for (int m = 0; m < M; ++m) capacity[m] -= tt.required(m) * T;
    }
    plan.explanations.push_back("type " + std::to_string(k) + (feasible ? ": served" : ": not served") +
                                ", budget consumed " + detail::fmt_double(spent) + " of " +
                                detail::fmt_double(batch.budget));
  }

  plan.total_cost = mobilization_spend(plan.a, cfg.mobilization_cost);
  plan.scored_cost = mobilization_cost(plan.a, cfg.mobilization_cost, pool);
  return plan;
}

/// Builds the plan that mobilizes `a` (top candidates per skill) and serves exactly `served`.
/// Returns nullopt when the pair violates a cap, the eligible pool, the budget, or capacity.
inline std::optional<MobilizationPlan> make_plan(std::span<const int> a, std::span<const int> served,
                                                 const SkillQueueState& state, std::span<const Worker> roster,
                                                 const TaskRequestBatch& batch, const MarketConfig& cfg) {
  const int M = cfg.skills;
  const int K = cfg.num_types();
  const auto candidates = eligible_by_skill(roster, M, cfg.epsilon, Presence::offline);
  for (int m = 0; m < M; ++m) {
    if (a[m] < 0 || a[m] > cfg.mobilization_cap[m]) return std::nullopt;
    if (a[m] > static_cast<int>(candidates[m].size())) return std::nullopt;
  }
  if (mobilization_spend(a, cfg.mobilization_cost) > batch.budget) return std::nullopt;
  if (detail::serves_empty_type(served, batch)) return std::nullopt;
  for (int m = 0; m < M; ++m) {
    long need = 0;
    for (int k = 0; k < K; ++k)
      if (served[k]) need += static_cast<long>(cfg.task_types[k].required(m)) * batch.demand[k];
    if (need > state.logged_in[m] + a[m]) return std::nullopt;
  }

  MobilizationPlan plan;
  plan.a.assign(a.begin(), a.end());
  plan.served.assign(served.begin(), served.end());
  plan.mobilized.assign(M, {});
  plan.order.resize(K);
  std::iota(plan.order.begin(), plan.order.end(), 0);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < a[m]; ++i) plan.mobilized[m].push_back({candidates[m][i].id, candidates[m][i].reliability});
  const auto pool = pool_reliabilities(roster, M, cfg.epsilon);
  plan.total_cost = mobilization_spend(plan.a, cfg.mobilization_cost);
  plan.scored_cost = mobilization_cost(plan.a, cfg.mobilization_cost, pool);
  for (int k = 0; k < K; ++k)
    plan.explanations.push_back("type " + std::to_string(k) + (served[k] ? ": served" : ": not served"));
  return plan;
}

/// Serves types in `order` all-or-nothing against logged-in capacity plus `a`.
inline std::vector<int> greedy_service(std::span<const int> a, std::span<const int> order,
                                       const SkillQueueState& state, const TaskRequestBatch& batch,
                                       const MarketConfig& cfg) {
  const int M = cfg.skills;
  std::vector<int> capacity(M);
  for (int m = 0; m < M; ++m) capacity[m] = state.logged_in[m] + a[m];
  std::vector<int> served(cfg.num_types(), 0);
  for (int k : order) {
    const auto& tt = cfg.task_types[k];
    bool ok = batch.demand[k] > 0;
    for (int m = 0; m < M; ++m) ok = ok && capacity[m] >= tt.required(m) * batch.demand[k];
    if (!ok) continue;
    served[k] = 1;
    for (int m = 0; m < M; ++m) capacity[m] -= tt.required(m) * batch.demand[k];
  }
  return served;
}

/// Lists every broken plan invariant; empty when the plan is sound.
inline std::vector<std::string> plan_violations(const MobilizationPlan& plan, const SkillQueueState& state,
                                                std::span<const Worker> roster, const TaskRequestBatch& batch,
                                                const MarketConfig& cfg) {
  std::vector<std::string> out;
  const int M = cfg.skills;
  for (int m = 0; m < M; ++m) {
    if (plan.a[m] > cfg.mobilization_cap[m]) out.push_back("cap exceeded for skill " + std::to_string(m));
    if (static_cast<int>(plan.mobilized[m].size()) != plan.a[m])
      out.push_back("mobilized list length differs from a for skill " + std::to_string(m));
    for (const auto& mw : plan.mobilized[m]) {
      if (mw.reliability < cfg.epsilon) out.push_back("mobilized worker below threshold");
      const auto it = std::find_if(roster.begin(), roster.end(), [&](const Worker& w) { return w.id == mw.id; });
      if (it == roster.end() || it->presence != Presence::offline || it->skill.index != m)
        out.push_back("mobilized worker " + std::to_string(mw.id) + " is not an offline worker of skill " +
                      std::to_string(m));
    }
  }
  if (mobilization_spend(plan.a, cfg.mobilization_cost) > batch.budget) out.push_back("budget exceeded");
  if (detail::serves_empty_type(plan.served, batch)) out.push_back("type with zero demand marked served");
  for (int m = 0; m < M; ++m) {
    long need = 0;
    for (int k = 0; k < cfg.num_types(); ++k)
      if (plan.served[k]) need += static_cast<long>(cfg.task_types[k].required(m)) * batch.demand[k];
    if (need > state.logged_in[m] + plan.a[m]) out.push_back("served types exceed capacity of skill " + std::to_string(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Team assembly

/// Staffs every served task instance, types in ascending id. Logged-in workers are used before
/// mobilized ones; within each group, descending reliability then ascending id.
inline TeamAssignment assemble_teams(const MobilizationPlan& plan, std::span<const Worker> roster,
                                     const TaskRequestBatch& batch, const MarketConfig& cfg) {
  const int M = cfg.skills;
  auto pool = eligible_by_skill(roster, M, cfg.epsilon, Presence::logged_in);
  for (int m = 0; m < M; ++m) {
    std::vector<Candidate> extra;
    for (const auto& mw : plan.mobilized[m]) extra.push_back({mw.id, mw.reliability});
    detail::sort_candidates(extra);
    pool[m].insert(pool[m].end(), extra.begin(), extra.end());
  }
  std::vector<std::size_t> next(M, 0);

  TeamAssignment out;
  for (int k = 0; k < cfg.num_types(); ++k) {
    if (!plan.served[k]) continue;
    const auto& tt = cfg.task_types[k];
    for (int i = 0; i < batch.demand[k]; ++i) {
      Team team{.task_type = k, .instance = i, .members = {}};
      for (int m = 0; m < M; ++m) {
        for (int j = 0; j < tt.required(m); ++j) {
          if (next[m] >= pool[m].size())
            throw Error(ErrorCode::InternalInconsistency,
                        "plan serves type " + std::to_string(k) + " but skill " + std::to_string(m) +
                            " has too few workers");
          team.members.push_back({pool[m][next[m]++].id, SkillId{m}});
        }
      }
      out.teams.push_back(std::move(team));
    }
  }
  return out;
}

}  // namespace crowdasm
