#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdasm/error.hpp"

namespace crowdasm {

/// Dense skill index in [0, M).
struct SkillId {
  int index = 0;
  friend bool operator==(SkillId, SkillId) = default;
  friend auto operator<=>(SkillId, SkillId) = default;
};

using WorkerId = std::int64_t;

enum class DemandMode { deterministic, poisson };
enum class DemandForm { exact_eq5, linearized_eq12 };
// How a served task's success is decided when it completes.
enum class OutcomeModel { bernoulli, always_success, frozen };
enum class Presence { logged_in, offline, busy };

struct TaskTypeSpec {
  int id = 0;
  std::vector<int> requirements;  // workers of each skill per task instance
  double price = 1.0;
  int demand_cap = 0;             // tasks per step
  int positive_ratings = 1;
  int service_time = 1;           // steps a serving worker stays busy

  friend bool operator==(const TaskTypeSpec&, const TaskTypeSpec&) = default;

  int required(int skill) const {
    return skill < static_cast<int>(requirements.size()) ? requirements[skill] : 0;
  }
};

/// Initial roster entry.
struct WorkerSpec {
  int skill = 0;
  Presence presence = Presence::offline;
  int successes = 0;
  int failures = 0;

  friend bool operator==(const WorkerSpec&, const WorkerSpec&) = default;
};

/// Seeded roster generator: per-skill head counts, histories drawn uniformly in [0, max_history].
struct GeneratedWorkers {
  std::vector<int> logged_in;
  std::vector<int> offline;
  int max_history = 10;

  friend bool operator==(const GeneratedWorkers&, const GeneratedWorkers&) = default;
};

struct MarketConfig {
  int skills = 2;
  std::vector<TaskTypeSpec> task_types;
  double alpha1 = 1.0;
  double alpha2 = -0.5;
  double alpha3 = 0.25;
  double epsilon = 0.5;
  double rho = 1.0;
  std::vector<double> mobilization_cost;
  std::vector<int> mobilization_cap;
  std::vector<double> budget_per_step{10.0};  // step t uses entry min(t, size-1)
  std::vector<double> arrival_rates;
  int horizon = 50;
  std::uint64_t seed = 42;
  DemandMode demand_mode = DemandMode::deterministic;
  DemandForm demand_form = DemandForm::exact_eq5;

  // Simulator extensions.
  std::optional<std::vector<std::vector<int>>> arrival_script;  // [t][m] fresh arrivals
  OutcomeModel outcome_model = OutcomeModel::bernoulli;
  bool rollback_on_infeasible = true;
  std::vector<WorkerSpec> workers;
  std::optional<GeneratedWorkers> generated_workers;

  int num_types() const { return static_cast<int>(task_types.size()); }

  double budget_at(int t) const {
    if (budget_per_step.empty()) return 0.0;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0)),
                                         budget_per_step.size() - 1);
    return budget_per_step[i];
  }

  friend bool operator==(const MarketConfig&, const MarketConfig&) = default;
};

/// Per-skill queue snapshot at the start of a planning pass.
struct SkillQueueState {
  std::vector<int> q;                 // available workers, q_m(t)
  std::vector<int> logged_in;         // idle logged-in workers with r >= epsilon
  std::vector<int> offline_eligible;  // offline workers with r >= epsilon
};

/// The built-in scenario used when a key is missing from a scenario file.
inline MarketConfig default_config() {
  MarketConfig cfg;
  cfg.skills = 2;
  cfg.task_types = {
      TaskTypeSpec{.id = 0, .requirements = {1, 1}, .price = 2.0, .demand_cap = 3,
                   .positive_ratings = 16, .service_time = 1},
      TaskTypeSpec{.id = 1, .requirements = {0, 2}, .price = 3.0, .demand_cap = 2,
                   .positive_ratings = 9, .service_time = 1},
  };
  cfg.mobilization_cost = {1.0, 2.0};
  cfg.mobilization_cap = {3, 3};
  cfg.budget_per_step = {10.0};
  cfg.arrival_rates = {0.2, 0.2};
  cfg.generated_workers = GeneratedWorkers{.logged_in = {4, 4}, .offline = {6, 6}, .max_history = 10};
  return cfg;
}

namespace detail {
inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
}  // namespace detail

/// Checks every invariant and throws ConfigError listing all of them. Idempotent.
inline MarketConfig validate_config(MarketConfig raw) {
  std::vector<Violation> out;
  auto fail = [&](ErrorCode c, std::string msg) { out.push_back({c, std::move(msg)}); };

  const int M = raw.skills;
  if (M < 1) fail(ErrorCode::BadSkillCount, "skills must be >= 1");
  if (!(raw.alpha2 < 0.0) || !(raw.alpha3 > 0.0))
    fail(ErrorCode::BadAlphaSigns, "require alpha2 < 0 and alpha3 > 0");
  if (!std::isfinite(raw.alpha1)) fail(ErrorCode::BadAlphaSigns, "alpha1 must be finite");
  if (!(raw.rho > 0.0) || !std::isfinite(raw.rho)) fail(ErrorCode::NonPositiveRho, "rho must be > 0");
  if (!(raw.epsilon > 0.0 && raw.epsilon < 1.0)) fail(ErrorCode::BadEpsilon, "epsilon must lie in (0,1)");
  if (raw.horizon < 0) fail(ErrorCode::BadTaskType, "horizon must be >= 0");
  if (raw.task_types.empty()) fail(ErrorCode::BadTaskType, "at least one task type is required");

  for (std::size_t k = 0; k < raw.task_types.size(); ++k) {
    const auto& tt = raw.task_types[k];
    const std::string tag = "task_types[" + std::to_string(k) + "]";
    if (tt.id != static_cast<int>(k)) fail(ErrorCode::BadTaskType, tag + ".id must equal its index");
    if (M >= 1 && static_cast<int>(tt.requirements.size()) != M)
      fail(ErrorCode::LengthMismatch, tag + ".requirements must have one entry per skill");
    bool any = false;
    for (int n : tt.requirements) {
      if (n < 0) fail(ErrorCode::EmptyRequirements, tag + " has a negative requirement");
      any = any || n > 0;
    }
    if (!any) fail(ErrorCode::EmptyRequirements, tag + " requires no workers");
    if (!(tt.price > 0.0) || !std::isfinite(tt.price)) fail(ErrorCode::NegativePrice, tag + ".price must be > 0");
    if (tt.demand_cap < 0) fail(ErrorCode::BadTaskType, tag + ".demand_cap must be >= 0");
    if (tt.positive_ratings < 1) fail(ErrorCode::BadTaskType, tag + ".positive_ratings must be >= 1");
    if (tt.service_time < 1) fail(ErrorCode::BadTaskType, tag + ".service_time must be >= 1");
  }

  auto check_len = [&](std::size_t n, const char* name) {
    if (M >= 1 && static_cast<int>(n) != M)
      fail(ErrorCode::LengthMismatch, std::string(name) + " must have one entry per skill");
  };
  check_len(raw.mobilization_cost.size(), "mobilization_cost");
  check_len(raw.mobilization_cap.size(), "mobilization_cap");
  check_len(raw.arrival_rates.size(), "arrival_rates");
  for (double c : raw.mobilization_cost)
    if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::BadCost, "mobilization_cost entries must be finite and > 0");
  for (int a : raw.mobilization_cap)
    if (a < 0) fail(ErrorCode::BadCost, "mobilization_cap entries must be >= 0");
  for (double r : raw.arrival_rates)
    if (!detail::finite_nonneg(r)) fail(ErrorCode::BadCost, "arrival_rates entries must be finite and >= 0");
  if (raw.budget_per_step.empty()) fail(ErrorCode::BadCost, "budget_per_step must not be empty");
  for (double b : raw.budget_per_step)
    if (!detail::finite_nonneg(b)) fail(ErrorCode::BadCost, "budget_per_step entries must be finite and >= 0");

  if (raw.arrival_script) {
    for (const auto& row : *raw.arrival_script) {
      check_len(row.size(), "arrival_script rows");
      for (int v : row)
        if (v < 0) fail(ErrorCode::BadCost, "arrival_script entries must be >= 0");
    }
  }
  for (std::size_t i = 0; i < raw.workers.size(); ++i) {
    const auto& w = raw.workers[i];
    const std::string tag = "workers[" + std::to_string(i) + "]";
    if (w.skill < 0 || w.skill >= M) fail(ErrorCode::BadWorker, tag + ".skill out of range");
    if (w.successes < 0 || w.failures < 0) fail(ErrorCode::BadWorker, tag + " has negative rating counts");
    if (w.presence == Presence::busy) fail(ErrorCode::BadWorker, tag + " cannot start busy");
  }
  if (raw.generated_workers) {
    check_len(raw.generated_workers->logged_in.size(), "generated_workers.logged_in");
    check_len(raw.generated_workers->offline.size(), "generated_workers.offline");
    for (int n : raw.generated_workers->logged_in)
      if (n < 0) fail(ErrorCode::BadWorker, "generated_workers counts must be >= 0");
    for (int n : raw.generated_workers->offline)
      if (n < 0) fail(ErrorCode::BadWorker, "generated_workers counts must be >= 0");
    if (raw.generated_workers->max_history < 0) fail(ErrorCode::BadWorker, "generated_workers.max_history must be >= 0");
  }

  if (!out.empty()) throw ConfigError(std::move(out));
  return raw;
}

/// Per-skill upper bound on worker consumption: sum over types of n_{m,k} * T_k^max.
inline std::vector<int> compute_mu_max(std::span<const TaskTypeSpec> task_types, int skills) {
  std::vector<int> mu(static_cast<std::size_t>(std::max(skills, 0)), 0);
  for (const auto& tt : task_types)
    for (int m = 0; m < skills; ++m) mu[m] += tt.required(m) * tt.demand_cap;
  return mu;
}

inline std::vector<int> compute_mu_max(const MarketConfig& cfg) {
  return compute_mu_max(cfg.task_types, cfg.skills);
}

/// Drift-bound constant: half the summed squares of the per-skill caps.
inline double compute_xi(std::span<const int> a_max, std::span<const int> mu_max) {
  if (a_max.size() != mu_max.size())
    throw Error(ErrorCode::LengthMismatch, "a_max and mu_max differ in length");
  double acc = 0.0;
  for (std::size_t m = 0; m < a_max.size(); ++m) {
    const double a = a_max[m];
    const double mu = mu_max[m];
    acc += a * a + mu * mu;
  }
  return 0.5 * acc;
}

inline double compute_xi(const MarketConfig& cfg) {
  const auto mu = compute_mu_max(cfg);
  return compute_xi(cfg.mobilization_cap, mu);
}

}  // namespace crowdasm
