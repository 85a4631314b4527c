#pragma once

#include <optional>
#include <span>
#include <vector>

#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"

namespace crowdasm {

struct RatingHistory {
  int successes = 0;
  int failures = 0;
  friend bool operator==(const RatingHistory&, const RatingHistory&) = default;
};

struct Worker {
  WorkerId id = 0;
  SkillId skill;
  RatingHistory history;
  Presence presence = Presence::offline;
  std::optional<int> busy_until;  // set iff presence == busy; step at which the worker returns

  friend bool operator==(const Worker&, const Worker&) = default;
};

/// Beta-reputation expectation (s + 1) / (s + f + 2); always strictly inside (0, 1).
inline double reliability(const RatingHistory& h) {
  return (static_cast<double>(h.successes) + 1.0) /
         (static_cast<double>(h.successes) + static_cast<double>(h.failures) + 2.0);
}

inline double reliability(const Worker& w) { return reliability(w.history); }

inline Worker record_outcome(Worker w, bool success) {
  if (success)
    ++w.history.successes;
  else
    ++w.history.failures;
  return w;
}

/// Mean reliability of the offline workers of `skill` whose reliability is at least `epsilon`.
/// Throws NoEligibleWorkers when nobody qualifies.
inline double pool_reliability(std::span<const Worker> roster, SkillId skill, double epsilon) {
  double sum = 0.0;
  int n = 0;
  for (const auto& w : roster) {
    if (w.skill != skill || w.presence != Presence::offline) continue;
    const double r = reliability(w);
    if (r < epsilon) continue;
    sum += r;
    ++n;
  }
  if (n == 0)
    throw Error(ErrorCode::NoEligibleWorkers,
                "no offline worker of skill " + std::to_string(skill.index) + " meets the threshold");
  return sum / n;
}

/// Non-throwing variant over all skills; empty entries mark skills whose offline pool is unusable.
inline std::vector<std::optional<double>> pool_reliabilities(std::span<const Worker> roster,
                                                             int skills, double epsilon) {
  std::vector<double> sum(static_cast<std::size_t>(skills), 0.0);
  std::vector<int> count(static_cast<std::size_t>(skills), 0);
  for (const auto& w : roster) {
    if (w.presence != Presence::offline) continue;
    const double r = reliability(w);
    if (r < epsilon) continue;
    sum[w.skill.index] += r;
    ++count[w.skill.index];
  }
  std::vector<std::optional<double>> out(static_cast<std::size_t>(skills));
  for (int m = 0; m < skills; ++m)
    if (count[m] > 0) out[m] = sum[m] / count[m];
  return out;
}

/// Requirement-weighted mean of the per-skill pool reliabilities over the skills a task uses.
inline double task_reliability(const TaskTypeSpec& task,
                               std::span<const std::optional<double>> pool) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t m = 0; m < task.requirements.size(); ++m) {
    const int n = task.requirements[m];
    if (n <= 0) continue;
    if (m >= pool.size() || !pool[m])
      throw Error(ErrorCode::MissingSkillReliability,
                  "task type " + std::to_string(task.id) + " needs skill " + std::to_string(m) +
                      " which has no pool reliability");
    num += n * *pool[m];
    den += n;
  }
  if (den == 0.0) throw Error(ErrorCode::MissingSkillReliability, "task type requires no skills");
  return num / den;
}

inline double task_reliability(const TaskTypeSpec& task, std::span<const double> pool) {
  std::vector<std::optional<double>> opt(pool.begin(), pool.end());
  return task_reliability(task, opt);
}

}  // namespace crowdasm
