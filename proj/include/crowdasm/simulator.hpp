#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "crowdasm/config_io.hpp"
#include "crowdasm/demand.hpp"
#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"
#include "crowdasm/reputation.hpp"
#include "crowdasm/scheduler.hpp"

namespace crowdasm {

using Rng = std::mt19937_64;

/// Everything a policy may look at when deciding one step.
struct PlanningView {
  const MarketConfig& cfg;
  const SkillQueueState& state;
  std::span<const Worker> roster;
  const TaskRequestBatch& batch;
  std::span<const double> expected_demand;
  int t = 0;
};

using Policy = std::function<MobilizationPlan(const PlanningView&, Rng&)>;

inline Policy crowdasm_policy() {
  return [](const PlanningView& v, Rng&) { return plan_mobilization(v.state, v.roster, v.batch, v.cfg); };
}

struct ActiveTask {
  int task_type = 0;
  int finish = 0;  // last busy step; the outcome is drawn at the end of this step
  std::vector<WorkerId> members;
};

/// Mutable state of one run. Worker ids equal their index in the roster.
struct World {
  std::vector<Worker> roster;
  std::vector<ActiveTask> active;
  long clamp_count = 0;
};

struct StepLedger {
  int t = 0;
  std::vector<int> q_before;
  std::vector<int> q_after;
  std::vector<int> returned;  // workers back from service
  std::vector<int> fresh;     // newly joined workers
  std::vector<int> demand;    // T_k
  std::vector<int> served_count;  // realized served tasks per type
  std::vector<double> expected;   // f_k
  std::vector<double> task_reliability;
  std::vector<std::optional<double>> pool_reliability;
  double budget = 0.0;
  MobilizationPlan plan;
  double expected_profit = 0.0;
  double realized_revenue = 0.0;
  double lyapunov = 0.0;  // L(q_before)
  int rating_events = 0;
  int completed_workers = 0;

  /// Newly available workers per skill, returning plus fresh.
  std::vector<int> became_available() const {
    std::vector<int> out(returned.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = returned[m] + fresh[m];
    return out;
  }
};

struct TraceHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  DemandForm demand_form = DemandForm::exact_eq5;
  std::string policy;
  MarketConfig config;
};

struct SimulationTrace {
  TraceHeader header;
  std::vector<StepLedger> steps;
  std::vector<Worker> final_roster;
  long clamp_count = 0;
};

// ---------------------------------------------------------------------------

inline double lyapunov_value(std::span<const int> q) {
  double s = 0.0;
  for (int v : q) s += static_cast<double>(v) * v;
  return 0.5 * s;
}

/// Profit of one step: sum_k d_k f_k p_k minus the scored mobilization cost.
inline double step_profit(std::span<const int> d, std::span<const double> f, std::span<const double> p,
                          double cost) {
  double revenue = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d[k]) revenue += f[k] * p[k];
  return revenue - cost;
}

inline World make_world(const MarketConfig& cfg, Rng& rng) {
  World w;
  auto add = [&](int skill, Presence presence, int s, int f) {
    Worker wk;
    wk.id = static_cast<WorkerId>(w.roster.size());
    wk.skill = SkillId{skill};
    wk.history = {s, f};
    wk.presence = presence;
    w.roster.push_back(wk);
  };
  for (const auto& ws : cfg.workers) add(ws.skill, ws.presence, ws.successes, ws.failures);
  if (cfg.generated_workers) {
    const auto& g = *cfg.generated_workers;
    std::uniform_int_distribution<int> hist(0, g.max_history);
    for (int m = 0; m < cfg.skills; ++m) {
      for (int i = 0; i < g.logged_in[m]; ++i) {
        const int s = hist(rng);
        const int f = hist(rng);
        add(m, Presence::logged_in, s, f);
      }
      for (int i = 0; i < g.offline[m]; ++i) {
        const int s = hist(rng);
        const int f = hist(rng);
        add(m, Presence::offline, s, f);
      }
    }
  }
  return w;
}

/// Reliability used on the demand side. Skills whose offline pool is empty fall back to the mean
/// over all eligible workers of that skill, then to the uniform prior.
inline std::vector<double> demand_reliabilities(const MarketConfig& cfg, std::span<const Worker> roster,
                                                std::span<const std::optional<double>> pool) {
  std::vector<std::optional<double>> filled(pool.begin(), pool.end());
  for (int m = 0; m < cfg.skills; ++m) {
    if (filled[m]) continue;
    double sum = 0.0;
    int n = 0;
    for (const auto& w : roster) {
      if (w.skill.index != m) continue;
      const double r = reliability(w);
      if (r < cfg.epsilon) continue;
      sum += r;
      ++n;
    }
    filled[m] = n > 0 ? sum / n : 0.5;
  }
  std::vector<double> out;
  out.reserve(cfg.task_types.size());
  for (const auto& tt : cfg.task_types) out.push_back(task_reliability(tt, filled));
  return out;
}

/// Advances the world by one step under `policy`.
inline StepLedger step(World& world, const MarketConfig& cfg, const Policy& policy, Rng& rng, int t) {
  const int M = cfg.skills;
  const int K = cfg.num_types();
  auto& roster = world.roster;

  StepLedger led;
  led.t = t;
  led.q_before = count_presence(roster, M, Presence::logged_in);
  led.lyapunov = lyapunov_value(led.q_before);

  // (1) returning workers and fresh arrivals
  led.returned.assign(M, 0);
  led.fresh.assign(M, 0);
  for (auto& w : roster) {
    if (w.presence == Presence::busy && w.busy_until && *w.busy_until <= t) {
      w.presence = Presence::logged_in;
      w.busy_until.reset();
      ++led.returned[w.skill.index];
    }
  }
  for (int m = 0; m < M; ++m) {
    int n = 0;
    if (cfg.arrival_script) {
      const auto& script = *cfg.arrival_script;
      if (t < static_cast<int>(script.size())) n = script[t][m];
    } else if (cfg.arrival_rates[m] > 0.0) {
      std::poisson_distribution<int> dist(cfg.arrival_rates[m]);
      n = dist(rng);
    }
    for (int i = 0; i < n; ++i) {
      Worker wk;
      wk.id = static_cast<WorkerId>(roster.size());
      wk.skill = SkillId{m};
      wk.presence = Presence::logged_in;
      roster.push_back(wk);
    }
    led.fresh[m] = n;
  }

  // (2) demand
  led.pool_reliability = pool_reliabilities(roster, M, cfg.epsilon);
  led.task_reliability = demand_reliabilities(cfg, roster, led.pool_reliability);
  const auto params = DemandParams::from(cfg);
  TaskRequestBatch batch;
  batch.budget = cfg.budget_at(t);
  led.budget = batch.budget;
  for (int k = 0; k < K; ++k) {
    const auto& tt = cfg.task_types[k];
    const double f = demand_for(tt.price, led.task_reliability[k], tt.positive_ratings, params, world.clamp_count);
    led.expected.push_back(f);
    batch.demand.push_back(realize_demand(f, tt.demand_cap, cfg.demand_mode, rng));
    batch.price.push_back(tt.price);
  }
  led.demand = batch.demand;

  // (3) plan and staff
  const auto state = queue_state(led.q_before, roster, M, cfg.epsilon);
  const PlanningView view{cfg, state, roster, batch, led.expected, t};
  led.plan = policy(view, rng);
  const auto teams = assemble_teams(led.plan, roster, batch, cfg);
  for (const auto& per_skill : led.plan.mobilized)
    for (const auto& mw : per_skill) roster[mw.id].presence = Presence::logged_in;

  // (4) served teams go busy
  led.served_count.assign(K, 0);
  for (const auto& team : teams.teams) {
    const int st = cfg.task_types[team.task_type].service_time;
    ActiveTask task{team.task_type, t + st - 1, {}};
    for (const auto& mem : team.members) {
      auto& w = roster[mem.id];
      if (w.presence != Presence::logged_in)
        throw Error(ErrorCode::InternalInconsistency, "worker assigned twice in one step");
      w.presence = Presence::busy;
      w.busy_until = t + st;
      task.members.push_back(mem.id);
    }
    ++led.served_count[team.task_type];
    world.active.push_back(std::move(task));
  }
  for (int k = 0; k < K; ++k) led.realized_revenue += led.served_count[k] * batch.price[k];

  // (5) completions and rating updates
  std::vector<ActiveTask> still_active;
  for (auto& task : world.active) {
    if (task.finish > t) {
      still_active.push_back(std::move(task));
      continue;
    }
    bool success = true;
    if (cfg.outcome_model == OutcomeModel::bernoulli) {
      double mean_r = 0.0;
      for (WorkerId id : task.members) mean_r += reliability(roster[id]);
      mean_r /= static_cast<double>(task.members.size());
      success = std::bernoulli_distribution(mean_r)(rng);
    }
    led.completed_workers += static_cast<int>(task.members.size());
    if (cfg.outcome_model != OutcomeModel::frozen) {
      for (WorkerId id : task.members) {
        roster[id] = record_outcome(roster[id], success);
        ++led.rating_events;
      }
    }
  }
  world.active = std::move(still_active);

  // (6) queue update and profit
  led.q_after = count_presence(roster, M, Presence::logged_in);
  led.expected_profit = step_profit(led.plan.served, led.expected, batch.price, led.plan.scored_cost);
  return led;
}

inline SimulationTrace run_with(const MarketConfig& raw_cfg, const Policy& policy, const std::string& policy_name) {
  const MarketConfig cfg = validate_config(raw_cfg);
  Rng rng(cfg.seed);
  SimulationTrace trace;
  trace.header = {config_hash(cfg), cfg.seed, cfg.demand_form, policy_name, cfg};
  World world = make_world(cfg, rng);
  trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));
  for (int t = 0; t < cfg.horizon; ++t) trace.steps.push_back(step(world, cfg, policy, rng, t));
  trace.final_roster = world.roster;
  trace.clamp_count = world.clamp_count;
  return trace;
}

}  // namespace crowdasm
