#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crowdasm/config_io.hpp"
#include "crowdasm/metrics.hpp"
#include "crowdasm/simulator.hpp"

namespace crowdasm {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string trace_csv(const SimulationTrace& trace) {
  const int M = trace.header.config.skills;
  const int K = trace.header.config.num_types();
  std::ostringstream os;
  os << "t";
  for (int m = 0; m < M; ++m) os << ",q_" << m;
  for (int k = 0; k < K; ++k) os << ",T_" << k;
  for (int k = 0; k < K; ++k) os << ",T_served_" << k;
  for (int k = 0; k < K; ++k) os << ",d_" << k;
  for (int m = 0; m < M; ++m) os << ",a_" << m;
  os << ",cost,delta,realized_revenue,lyapunov\n";
  for (const auto& s : trace.steps) {
    os << s.t;
    for (int v : s.q_before) os << ',' << v;
    for (int v : s.demand) os << ',' << v;
    for (int v : s.served_count) os << ',' << v;
    for (int v : s.plan.served) os << ',' << v;
    for (int v : s.plan.a) os << ',' << v;
    os << ',' << format_number(s.plan.scored_cost) << ',' << format_number(s.expected_profit) << ','
       << format_number(s.realized_revenue) << ',' << format_number(s.lyapunov) << '\n';
  }
  return os.str();
}

inline std::string bound_reports_csv(std::span<const BoundReport> reports) {
  std::ostringstream os;
  os << "rho,xi,delta_opt,avg_profit,bound_rhs,satisfied,margin,tolerance\n";
  for (const auto& r : reports) {
    os << format_number(r.rho) << ',' << format_number(r.xi) << ',' << format_number(r.delta_opt) << ','
       << format_number(r.avg_profit) << ',' << format_number(r.bound_rhs) << ',' << (r.satisfied ? 1 : 0) << ','
       << format_number(r.margin) << ',' << format_number(r.tolerance) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json_value(const BoundReport& r) {
  return {{"rho", r.rho},           {"xi", r.xi},           {"delta_opt", r.delta_opt},
          {"avg_profit", r.avg_profit}, {"bound_rhs", r.bound_rhs}, {"satisfied", r.satisfied},
          {"margin", r.margin},     {"tolerance", r.tolerance}};
}

inline json to_json_value(const MobilizationPlan& p) {
  json mob = json::array();
  for (const auto& per_skill : p.mobilized) {
    json ids = json::array();
    for (const auto& mw : per_skill) ids.push_back({{"id", mw.id}, {"reliability", mw.reliability}});
    mob.push_back(ids);
  }
  return {{"a", p.a},
          {"served", p.served},
          {"mobilized", mob},
          {"order", p.order},
          {"total_cost", p.total_cost},
          {"scored_cost", p.scored_cost},
          {"explanations", p.explanations}};
}

inline MobilizationPlan plan_from_json(const json& j) {
  MobilizationPlan p;
  p.a = j.at("a").get<std::vector<int>>();
  p.served = j.at("served").get<std::vector<int>>();
  for (const auto& per_skill : j.at("mobilized")) {
    std::vector<MobilizedWorker> v;
    for (const auto& e : per_skill) v.push_back({e.at("id").get<WorkerId>(), e.at("reliability").get<double>()});
    p.mobilized.push_back(std::move(v));
  }
  p.order = j.at("order").get<std::vector<int>>();
  p.total_cost = j.at("total_cost").get<double>();
  p.scored_cost = j.at("scored_cost").get<double>();
  p.explanations = j.at("explanations").get<std::vector<std::string>>();
  return p;
}

/// Full trace, sufficient to re-render every report file.
inline json trace_to_json(const SimulationTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json pool = json::array();
    for (const auto& r : s.pool_reliability) pool.push_back(r ? json(*r) : json(nullptr));
    steps.push_back({{"t", s.t},
                     {"q_before", s.q_before},
                     {"q_after", s.q_after},
                     {"returned", s.returned},
                     {"fresh", s.fresh},
                     {"demand", s.demand},
                     {"served_count", s.served_count},
                     {"expected", s.expected},
                     {"task_reliability", s.task_reliability},
                     {"pool_reliability", pool},
                     {"budget", s.budget},
                     {"plan", to_json_value(s.plan)},
                     {"expected_profit", s.expected_profit},
                     {"realized_revenue", s.realized_revenue},
                     {"lyapunov", s.lyapunov},
                     {"rating_events", s.rating_events},
                     {"completed_workers", s.completed_workers}});
  }
  json roster = json::array();
  for (const auto& w : trace.final_roster)
    roster.push_back({{"id", w.id},
                      {"skill", w.skill.index},
                      {"successes", w.history.successes},
                      {"failures", w.history.failures},
                      {"presence", to_string(w.presence)},
                      {"busy_until", w.busy_until ? json(*w.busy_until) : json(nullptr)}});
  return {{"header",
           {{"config_hash", trace.header.config_hash},
            {"seed", trace.header.seed},
            {"demand_form", to_string(trace.header.demand_form)},
            {"policy", trace.header.policy},
            {"config", to_json_value(trace.header.config)}}},
          {"clamp_count", trace.clamp_count},
          {"steps", steps},
          {"final_roster", roster}};
}

inline SimulationTrace trace_from_json(const json& j) {
  try {
    SimulationTrace tr;
    const auto& h = j.at("header");
    tr.header.config_hash = h.at("config_hash").get<std::string>();
    tr.header.seed = h.at("seed").get<std::uint64_t>();
    tr.header.policy = h.at("policy").get<std::string>();
    tr.header.config = validate_config(config_from_json(h.at("config")));
    tr.header.demand_form = tr.header.config.demand_form;
    tr.clamp_count = j.at("clamp_count").get<long>();
    for (const auto& s : j.at("steps")) {
      StepLedger led;
      led.t = s.at("t").get<int>();
      led.q_before = s.at("q_before").get<std::vector<int>>();
      led.q_after = s.at("q_after").get<std::vector<int>>();
      led.returned = s.at("returned").get<std::vector<int>>();
      led.fresh = s.at("fresh").get<std::vector<int>>();
      led.demand = s.at("demand").get<std::vector<int>>();
      led.served_count = s.at("served_count").get<std::vector<int>>();
      led.expected = s.at("expected").get<std::vector<double>>();
      led.task_reliability = s.at("task_reliability").get<std::vector<double>>();
      for (const auto& r : s.at("pool_reliability"))
        led.pool_reliability.push_back(r.is_null() ? std::nullopt : std::optional<double>(r.get<double>()));
      led.budget = s.at("budget").get<double>();
      led.plan = plan_from_json(s.at("plan"));
      led.expected_profit = s.at("expected_profit").get<double>();
      led.realized_revenue = s.at("realized_revenue").get<double>();
      led.lyapunov = s.at("lyapunov").get<double>();
      led.rating_events = s.at("rating_events").get<int>();
      led.completed_workers = s.at("completed_workers").get<int>();
      tr.steps.push_back(std::move(led));
    }
    for (const auto& w : j.at("final_roster")) {
      Worker wk;
      wk.id = w.at("id").get<WorkerId>();
      wk.skill = SkillId{w.at("skill").get<int>()};
      wk.history = {w.at("successes").get<int>(), w.at("failures").get<int>()};
      const auto p = w.at("presence").get<std::string>();
      wk.presence = p == "logged_in" ? Presence::logged_in : p == "busy" ? Presence::busy : Presence::offline;
      if (!w.at("busy_until").is_null()) wk.busy_until = w.at("busy_until").get<int>();
      tr.final_roster.push_back(wk);
    }
    return tr;
  } catch (const json::exception& e) {
    throw ConfigError({Violation{ErrorCode::ParseError, std::string("malformed trace: ") + e.what()}});
  }
}

inline json trace_summary(const SimulationTrace& trace) {
  const auto& cfg = trace.header.config;
  long mobilized = 0;
  double spend = 0.0;
  double scored = 0.0;
  double revenue = 0.0;
  std::vector<long> served(cfg.num_types(), 0);
  for (const auto& s : trace.steps) {
    for (int a : s.plan.a) mobilized += a;
    spend += s.plan.total_cost;
    scored += s.plan.scored_cost;
    revenue += s.realized_revenue;
    for (int k = 0; k < cfg.num_types(); ++k) served[k] += s.served_count[k];
  }
  json j;
  j["config_hash"] = trace.header.config_hash;
  j["seed"] = trace.header.seed;
  j["policy"] = trace.header.policy;
  j["demand_form"] = to_string(trace.header.demand_form);
  j["horizon"] = cfg.horizon;
  j["steps"] = trace.steps.size();
  j["time_averaged_profit"] = trace.steps.empty() ? json(nullptr) : json(time_averaged_profit(trace));
  j["mean_backlog"] = trace.steps.empty() ? json(nullptr) : json(mean_backlog(trace));
  j["total_mobilized"] = mobilized;
  j["total_mobilization_spend"] = spend;
  j["total_scored_cost"] = scored;
  j["total_realized_revenue"] = revenue;
  j["served_tasks"] = served;
  j["clamp_count"] = trace.clamp_count;
  j["xi"] = compute_xi(cfg);
  j["effective_config"] = to_json_value(cfg);
  return j;
}

inline json summary_document(std::span<const SimulationTrace> traces, std::span<const BoundReport> reports) {
  json runs = json::array();
  for (const auto& t : traces) runs.push_back(trace_summary(t));
  json bounds = json::array();
  for (const auto& r : reports) bounds.push_back(to_json_value(r));
  return {{"run_count", traces.size()}, {"runs", runs}, {"bound_reports", bounds}};
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::string label;
  std::vector<double> values;
};

/// Self-contained static line chart; x is the step index.
inline std::string svg_line_chart(const std::string& title, std::span<const Series> series) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const double W = 640, H = 360, L = 60, R = 20, T = 40, B = 40;
  double lo = 0.0, hi = 0.0;
  std::size_t n = 0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      if (first) lo = hi = v, first = false;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  const double xspan = n > 1 ? static_cast<double>(n - 1) : 1.0;
  auto px = [&](std::size_t i) { return L + (W - L - R) * static_cast<double>(i) / xspan; };
  auto py = [&](double v) { return T + (H - T - B) * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream os;
  char buf[128];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", L,
                H - B, W - R, H - B);
  os << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", L, T,
                L, H - B);
  os << buf;
  os << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"11\">" << format_number(hi) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"11\">" << format_number(lo) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"11\">t=" << (n > 0 ? n - 1 : 0) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < s.values.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", t ? " " : "", px(t), py(s.values[t]));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << L + 8 + 110 * static_cast<double>(i) << "\" y=\"" << H - 8 << "\" fill=\"" << color
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::vector<std::pair<std::string, std::string>> trace_charts(const SimulationTrace& trace) {
  std::vector<std::pair<std::string, std::string>> out;
  Series profit{"delta", {}};
  for (const auto& s : trace.steps) profit.values.push_back(s.expected_profit);
  out.emplace_back("profit", svg_line_chart("Per-step profit", std::span<const Series>(&profit, 1)));

  std::vector<Series> queues;
  for (int m = 0; m < trace.header.config.skills; ++m) {
    Series s{"q_" + std::to_string(m), {}};
    for (const auto& st : trace.steps) s.values.push_back(st.q_before[m]);
    queues.push_back(std::move(s));
  }
  out.emplace_back("queues", svg_line_chart("Available workers per skill", queues));

  Series drift{"drift", {}};
  if (trace.steps.size() >= 2) drift.values = drift_series(trace);
  out.emplace_back("drift", svg_line_chart("Lyapunov drift", std::span<const Series>(&drift, 1)));
  return out;
}

// ---------------------------------------------------------------------------
// Export

struct ExportOptions {
  bool csv = true;
  bool json = true;
  bool svg = false;
};

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::string run_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03zu", i);
  return buf;
}

/// Writes per-run CSV, trace JSON and charts plus summary.json (and bound_reports.csv when any
/// reports are given) into `dir`.
inline void export_report(std::span<const SimulationTrace> traces, std::span<const BoundReport> reports,
                          const std::filesystem::path& dir, const ExportOptions& opts = {}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto stem = run_stem(i);
    if (opts.csv) write_file(dir / (stem + ".csv"), trace_csv(traces[i]));
    if (opts.json) write_file(dir / (stem + ".trace.json"), trace_to_json(traces[i]).dump(1) + "\n");
    if (opts.svg)
      for (const auto& [name, svg] : trace_charts(traces[i])) write_file(dir / (stem + "_" + name + ".svg"), svg);
  }
  if (opts.json) write_file(dir / "summary.json", summary_document(traces, reports).dump(2) + "\n");
  if (opts.csv && !reports.empty()) write_file(dir / "bound_reports.csv", bound_reports_csv(reports));
}

}  // namespace crowdasm
