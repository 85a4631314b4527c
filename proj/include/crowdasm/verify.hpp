#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crowdasm/config_io.hpp"
#include "crowdasm/metrics.hpp"
#include "crowdasm/oracle.hpp"
#include "crowdasm/scenario_gen.hpp"
#include "crowdasm/scheduler.hpp"
#include "crowdasm/simulator.hpp"

namespace crowdasm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline const std::vector<double>& bound_rho_grid() {
  static const std::vector<double> grid{0.5, 1.0, 2.0, 5.0, 10.0};
  return grid;
}

struct EquivalenceStats {
  int instances = 0;
  int mismatches = 0;
  double max_abs_diff = 0.0;
};

/// CrowdAsm's objective against the exhaustive minimum for the same served set.
inline EquivalenceStats oracle_equivalence(int count, std::uint64_t base_seed) {
  EquivalenceStats st;
  for (int i = 0; i < count; ++i) {
    const auto inst = random_tiny_instance(base_seed + static_cast<std::uint64_t>(i));
    const auto plan = plan_mobilization(inst.state, inst.roster, inst.batch, inst.cfg);
    const auto pool = pool_reliabilities(inst.roster, inst.cfg.skills, inst.cfg.epsilon);
    const auto scores = mobilization_scores(inst.state.q, inst.cfg.rho, inst.cfg.mobilization_cost, pool);
    const auto oracle = brute_force_mobilization(inst.state, inst.roster, inst.batch, inst.cfg, plan.served);
    ++st.instances;
    if (!oracle.found) {
      ++st.mismatches;
      continue;
    }
    const double diff = std::abs(plan_objective(plan.a, scores) - oracle.best_objective);
    st.max_abs_diff = std::max(st.max_abs_diff, diff);
    if (diff > 1e-12) ++st.mismatches;
  }
  return st;
}

/// Runs the fixture checks listed in `<dir>/frozen.json`.
inline std::vector<CheckResult> verify_fixtures(const std::filesystem::path& dir) {
  std::vector<CheckResult> out;
  const json frozen = read_json_file((dir / "frozen.json").string());
  for (const auto& [name, expect] : frozen.items()) {
    const MarketConfig cfg = load_config((dir / (name + ".json")).string());
    const auto opt = horizon_optimal(cfg);
    const double frozen_opt = expect.at("delta_opt").get<double>();
    out.push_back({name + ": delta_opt matches frozen value", std::abs(opt.average - frozen_opt) <= 1e-9,
                   "computed " + format_number(opt.average) + ", frozen " + format_number(frozen_opt)});

    const double xi = compute_xi(cfg);
    for (double rho : bound_rho_grid()) {
      MarketConfig c = cfg;
      c.rho = rho;
      const auto trace = run(c, "crowdasm");
      const auto rep = bound_check(time_averaged_profit(trace), opt.average, xi, rho, 1e-9);
      out.push_back({name + ": profit bound at rho=" + format_number(rho), rep.satisfied,
                     "avg " + format_number(rep.avg_profit) + " >= rhs " + format_number(rep.bound_rhs)});
    }

    if (expect.contains("q_trajectory")) {
      const auto want = expect["q_trajectory"].get<std::vector<std::vector<int>>>();
      const auto trace = run(cfg, "crowdasm");
      std::vector<std::vector<int>> got;
      for (const auto& s : trace.steps) got.push_back(s.q_before);
      if (!trace.steps.empty()) got.push_back(trace.steps.back().q_after);
      out.push_back({name + ": queue trajectory", got == want, ""});
    }
  }
  return out;
}

}  // namespace crowdasm
