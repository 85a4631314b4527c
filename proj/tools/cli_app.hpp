#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "crowdasm/crowdasm.hpp"
#include "crowdasm/verify.hpp"

#ifndef CROWDASM_SCENARIO_DIR
#define CROWDASM_SCENARIO_DIR "scenarios"
#endif

namespace crowdasm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2, kIo = 3 };

struct Override {
  std::string key;
  std::vector<json> values;
};

inline Override parse_override(const std::string& text, bool allow_list) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError({Violation{ErrorCode::UnknownKey, "override must look like key=value: " + text}});
  Override o;
  o.key = text.substr(0, eq);
  const auto items = allow_list ? split_override_list(text.substr(eq + 1))
                                : std::vector<std::string>{text.substr(eq + 1)};
  for (const auto& item : items) o.values.push_back(parse_override_value(item));
  return o;
}

/// Scenario file (or the built-in defaults), then overrides, then the seed override.
inline MarketConfig effective_config(const std::string& scenario,
                                     const std::vector<std::pair<std::string, json>>& overrides,
                                     std::optional<std::uint64_t> seed) {
  const json doc = scenario.empty() ? json::object() : read_json_file(scenario);
  json full = to_json_value(config_from_json(doc));
  for (const auto& [key, value] : overrides) apply_override(full, key, value);
  if (seed) full["seed"] = *seed;
  return validate_config(config_from_json(full));
}

inline ExportOptions export_options(const std::vector<std::string>& formats) {
  if (formats.empty()) return {};
  ExportOptions o{false, false, false};
  for (const auto& f : formats) {
    if (f == "csv") o.csv = true;
    if (f == "json") o.json = true;
    if (f == "svg") o.svg = true;
  }
  return o;
}

inline std::string default_out_dir() {
  if (const char* env = std::getenv("CROWDASM_OUT"); env && *env) return env;
  return "crowdasm-out";
}

/// Bound report when the scenario is small and scripted enough for the horizon search.
inline std::optional<BoundReport> try_bound(const MarketConfig& cfg, double avg_profit) {
  try {
    const auto opt = horizon_optimal(cfg);
    return bound_check(avg_profit, opt.average, compute_xi(cfg), cfg.rho);
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct CommonArgs {
  std::string scenario;
  std::string policy = "crowdasm";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string out;
  std::vector<std::string> formats;
};

inline void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--scenario", a.scenario, "Scenario JSON file (built-in defaults when omitted)");
  sub->add_option("--policy", a.policy, "crowdasm | never | max | random | oracle-step")
      ->check(CLI::IsMember({"crowdasm", "never", "max", "random", "oracle-step"}));
  sub->add_option("--seed", a.seed, "Seed override");
  sub->add_option("--set", a.sets, "Override KEY=VALUE (repeatable)");
  sub->add_option("--out", a.out, "Output directory (default $CROWDASM_OUT or ./crowdasm-out)");
  sub->add_option("--format", a.formats, "csv | json | svg (repeatable)")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
}

inline int cmd_run(const CommonArgs& a, std::ostream& out) {
  std::vector<std::pair<std::string, json>> overrides;
  for (const auto& s : a.sets) {
    auto o = parse_override(s, false);
    overrides.emplace_back(o.key, o.values.front());
  }
  const auto cfg = effective_config(a.scenario, overrides, a.seed);
  const auto trace = run(cfg, a.policy);
  std::vector<BoundReport> reports;
  if (!trace.steps.empty())
    if (auto b = try_bound(cfg, time_averaged_profit(trace))) reports.push_back(*b);
  const std::string dir = a.out.empty() ? default_out_dir() : a.out;
  const SimulationTrace traces[] = {trace};
  export_report(traces, reports, dir, export_options(a.formats));
  out << "run policy=" << a.policy << " steps=" << trace.steps.size() << " config=" << trace.header.config_hash;
  if (!trace.steps.empty())
    out << " avg_profit=" << format_number(time_averaged_profit(trace))
        << " mean_backlog=" << format_number(mean_backlog(trace));
  out << " out=" << dir << "\n";
  return kOk;
}

inline int cmd_sweep(const CommonArgs& a, std::ostream& out) {
  std::vector<Override> axes;
  for (const auto& s : a.sets) axes.push_back(parse_override(s, true));

  // Cross product, first axis slowest.
  std::vector<std::vector<std::pair<std::string, json>>> combos{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::pair<std::string, json>>> next;
    for (const auto& c : combos)
      for (const auto& v : axis.values) {
        auto e = c;
        e.emplace_back(axis.key, v);
        next.push_back(std::move(e));
      }
    combos = std::move(next);
  }

  std::vector<SimulationTrace> traces;
  std::vector<BoundReport> reports;
  std::ostringstream table;
  table << "index";
  for (const auto& axis : axes) table << ',' << axis.key;
  table << ",rho,xi,avg_profit,mean_backlog,delta_opt,bound_rhs,satisfied\n";
  for (std::size_t i = 0; i < combos.size(); ++i) {
    const auto cfg = effective_config(a.scenario, combos[i], a.seed);
    auto trace = run(cfg, a.policy);
    const double xi = compute_xi(cfg);
    table << i;
    for (const auto& [_, v] : combos[i]) table << ',' << (v.is_string() ? v.get<std::string>() : v.dump());
    table << ',' << format_number(cfg.rho) << ',' << format_number(xi);
    if (trace.steps.empty()) {
      table << ",NA,NA,NA,NA,NA\n";
    } else {
      const double avg = time_averaged_profit(trace);
      table << ',' << format_number(avg) << ',' << format_number(mean_backlog(trace));
      if (auto b = try_bound(cfg, avg)) {
        reports.push_back(*b);
        table << ',' << format_number(b->delta_opt) << ',' << format_number(b->bound_rhs) << ','
              << (b->satisfied ? 1 : 0) << '\n';
      } else {
        table << ",NA,NA,NA\n";
      }
    }
    traces.push_back(std::move(trace));
  }
  const std::string dir = a.out.empty() ? default_out_dir() : a.out;
  export_report(traces, reports, dir, export_options(a.formats));
  write_file(std::filesystem::path(dir) / "sweep.csv", table.str());
  out << table.str();
  return kOk;
}

struct VerifyArgs {
  std::string fixtures = CROWDASM_SCENARIO_DIR;
  int instances = 500;
  std::uint64_t seed = 1;
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  std::vector<CheckResult> checks;
  const auto eq = oracle_equivalence(a.instances, a.seed);
  checks.push_back({"per-step oracle equivalence", eq.mismatches == 0,
                    std::to_string(eq.instances) + " instances, max |diff| " + format_number(eq.max_abs_diff)});
  for (auto& c : verify_fixtures(a.fixtures)) checks.push_back(std::move(c));

  const auto cfg = load_config((std::filesystem::path(a.fixtures) / "tiny3.json").string());
  const auto t1 = run(cfg, "crowdasm");
  const auto t2 = run(cfg, "crowdasm");
  checks.push_back({"determinism", trace_csv(t1) == trace_csv(t2) && trace_to_json(t1) == trace_to_json(t2), ""});

  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed;
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
  out << (all ? "verify: all checks passed\n" : "verify: FAILED\n");
  return all ? kOk : kVerifyFailed;
}

inline int cmd_report(const std::vector<std::string>& paths, const std::string& out_dir,
                      const std::vector<std::string>& formats, std::ostream& out) {
  std::vector<SimulationTrace> traces;
  for (const auto& p : paths) traces.push_back(trace_from_json(read_json_file(p)));
  const std::string dir = out_dir.empty() ? default_out_dir() : out_dir;
  export_report(traces, {}, dir, export_options(formats));
  out << "report runs=" << traces.size() << " out=" << dir << "\n";
  return kOk;
}

inline int execute(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Collaborative crowdsourcing team-assembly simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation and write its reports");
  add_common(run_cmd, run_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the cross product of --set KEY=V1,V2,... lists");
  add_common(sweep_cmd, sweep_args);

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Oracle equivalence and profit-bound checks on bundled fixtures");
  verify_cmd->add_option("--fixtures", verify_args.fixtures, "Fixture directory");
  verify_cmd->add_option("--instances", verify_args.instances, "Random tiny instances for the oracle check");
  verify_cmd->add_option("--seed", verify_args.seed, "Base seed for the random instances");

  std::vector<std::string> report_traces, report_formats;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Re-render reports from stored trace JSON files");
  report_cmd->add_option("--trace", report_traces, "Trace JSON (repeatable)")->required();
  report_cmd->add_option("--out", report_out, "Output directory");
  report_cmd->add_option("--format", report_formats, "csv | json | svg (repeatable)")
      ->check(CLI::IsMember({"csv", "json", "svg"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out);
    if (*sweep_cmd) return cmd_sweep(sweep_args, out);
    if (*verify_cmd) return cmd_verify(verify_args, out);
    if (*report_cmd) return cmd_report(report_traces, report_out, report_formats, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? kIo : kUsage;
  }
  return kUsage;
}

}  // namespace crowdasm::cli
