#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "crowdasm/error.hpp"
#include "crowdasm/simulator.hpp"

namespace crowdasm {

/// Per-step drift L(q(t+1)) - L(q(t)) for t in [0, tau - 1).
inline std::vector<double> drift_series(const SimulationTrace& trace) {
  if (trace.steps.size() < 2) throw Error(ErrorCode::TraceTooShort, "drift needs at least two steps");
  std::vector<double> out;
  out.reserve(trace.steps.size() - 1);
  for (std::size_t t = 0; t + 1 < trace.steps.size(); ++t)
    out.push_back(trace.steps[t + 1].lyapunov - trace.steps[t].lyapunov);
  return out;
}

inline double time_averaged_profit(std::span<const double> profits) {
  if (profits.empty()) throw Error(ErrorCode::EmptyTrace, "no steps to average");
  double s = 0.0;
  for (double p : profits) s += p;
  return s / static_cast<double>(profits.size());
}

inline double time_averaged_profit(const SimulationTrace& trace) {
  std::vector<double> p;
  p.reserve(trace.steps.size());
  for (const auto& s : trace.steps) p.push_back(s.expected_profit);
  return time_averaged_profit(p);
}

/// Mean over steps of the total available-worker count sum_m q_m(t).
inline double mean_backlog(const SimulationTrace& trace) {
  if (trace.steps.empty()) throw Error(ErrorCode::EmptyTrace, "no steps to average");
  double s = 0.0;
  for (const auto& st : trace.steps)
    for (int q : st.q_before) s += q;
  return s / static_cast<double>(trace.steps.size());
}

struct BoundReport {
  double rho = 0.0;
  double xi = 0.0;
  double delta_opt = 0.0;
  double avg_profit = 0.0;
  double bound_rhs = 0.0;
  bool satisfied = false;
  double margin = 0.0;
  double tolerance = 0.0;
};

/// Checks avg_profit >= delta_opt - xi / rho within `tolerance`.
inline BoundReport bound_check(double avg_profit, double delta_opt, double xi, double rho,
                               double tolerance = 1e-9) {
  BoundReport r;
  r.rho = rho;
  r.xi = xi;
  r.delta_opt = delta_opt;
  r.avg_profit = avg_profit;
  r.bound_rhs = delta_opt - xi / rho;
  r.margin = avg_profit - r.bound_rhs;
  r.tolerance = tolerance;
  r.satisfied = r.margin >= -tolerance;
  return r;
}

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation
  double std_error = 0.0;
  double half_width_95 = 0.0;
};

inline SampleStats sample_stats(std::span<const double> xs) {
  SampleStats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(xs.size()));
    s.half_width_95 = 1.96 * s.std_error;
  }
  return s;
}

}  // namespace crowdasm
