#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"

namespace crowdasm {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Enum spellings

inline std::string_view to_string(DemandMode m) {
  return m == DemandMode::deterministic ? "deterministic" : "poisson";
}
inline std::string_view to_string(DemandForm f) {
  return f == DemandForm::exact_eq5 ? "exact_eq5" : "linearized_eq12";
}
inline std::string_view to_string(OutcomeModel o) {
  switch (o) {
    case OutcomeModel::bernoulli: return "bernoulli";
    case OutcomeModel::always_success: return "always_success";
    case OutcomeModel::frozen: return "frozen";
  }
  return "bernoulli";
}
inline std::string_view to_string(Presence p) {
  switch (p) {
    case Presence::logged_in: return "logged_in";
    case Presence::offline: return "offline";
    case Presence::busy: return "busy";
  }
  return "offline";
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& msg) {
  throw ConfigError({Violation{ErrorCode::ParseError, msg}});
}

template <class E>
E parse_enum(const json& j, std::string_view key, std::initializer_list<E> values) {
  if (!j.is_string()) parse_fail(std::string(key) + " must be a string");
  const auto s = j.get<std::string>();
  for (E v : values)
    if (to_string(v) == s) return v;
  parse_fail("unrecognized value '" + s + "' for " + std::string(key));
}

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                           const std::string& where) {
  std::vector<Violation> bad;
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (auto name : known) ok = ok || name == k;
    if (!ok) bad.push_back({ErrorCode::UnknownKey, "unknown key '" + k + "' in " + where});
  }
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

template <class T>
T get_as(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    parse_fail("bad value for " + std::string(key) + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MarketConfig <-> JSON

inline json to_json_value(const MarketConfig& cfg) {
  json j;
  j["skills"] = cfg.skills;
  j["task_types"] = json::array();
  for (const auto& tt : cfg.task_types) {
    j["task_types"].push_back({{"id", tt.id},
                               {"requirements", tt.requirements},
                               {"price", tt.price},
                               {"demand_cap", tt.demand_cap},
                               {"positive_ratings", tt.positive_ratings},
                               {"service_time", tt.service_time}});
  }
  j["alpha1"] = cfg.alpha1;
  j["alpha2"] = cfg.alpha2;
  j["alpha3"] = cfg.alpha3;
  j["epsilon"] = cfg.epsilon;
  j["rho"] = cfg.rho;
  j["mobilization_cost"] = cfg.mobilization_cost;
  j["mobilization_cap"] = cfg.mobilization_cap;
  j["budget_per_step"] = cfg.budget_per_step;
  j["arrival_rates"] = cfg.arrival_rates;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  j["demand_mode"] = to_string(cfg.demand_mode);
  j["demand_form"] = to_string(cfg.demand_form);
  j["arrival_script"] = cfg.arrival_script ? json(*cfg.arrival_script) : json(nullptr);
  j["outcome_model"] = to_string(cfg.outcome_model);
  j["rollback_on_infeasible"] = cfg.rollback_on_infeasible;
  j["workers"] = json::array();
  for (const auto& w : cfg.workers)
    j["workers"].push_back({{"skill", w.skill},
                            {"presence", to_string(w.presence)},
                            {"successes", w.successes},
                            {"failures", w.failures}});
  if (cfg.generated_workers)
    j["generated_workers"] = {{"logged_in", cfg.generated_workers->logged_in},
                              {"offline", cfg.generated_workers->offline},
                              {"max_history", cfg.generated_workers->max_history}};
  else
    j["generated_workers"] = nullptr;
  return j;
}

/// Parses a scenario document. Missing keys take the built-in defaults; unknown keys are errors.
/// The result is not yet validated.
inline MarketConfig config_from_json(const json& j) {
  using detail::get_as;
  if (!j.is_object()) detail::parse_fail("scenario must be a JSON object");
  detail::reject_unknown(j,
                         {"skills", "task_types", "alpha1", "alpha2", "alpha3", "epsilon", "rho",
                          "mobilization_cost", "mobilization_cap", "budget_per_step", "arrival_rates",
                          "horizon", "seed", "demand_mode", "demand_form", "arrival_script",
                          "outcome_model", "rollback_on_infeasible", "workers", "generated_workers"},
                         "scenario");
  MarketConfig cfg = default_config();
  if (j.contains("skills")) cfg.skills = get_as<int>(j["skills"], "skills");
  if (j.contains("task_types")) {
    if (!j["task_types"].is_array()) detail::parse_fail("task_types must be an array");
    cfg.task_types.clear();
    for (const auto& t : j["task_types"]) {
      if (!t.is_object()) detail::parse_fail("task_types entries must be objects");
      detail::reject_unknown(t, {"id", "requirements", "price", "demand_cap", "positive_ratings", "service_time"},
                             "task_types entry");
      TaskTypeSpec tt;
      tt.id = t.contains("id") ? get_as<int>(t["id"], "id") : static_cast<int>(cfg.task_types.size());
      if (!t.contains("requirements")) detail::parse_fail("task type is missing requirements");
      tt.requirements = get_as<std::vector<int>>(t["requirements"], "requirements");
      if (t.contains("price")) tt.price = get_as<double>(t["price"], "price");
      if (t.contains("demand_cap")) tt.demand_cap = get_as<int>(t["demand_cap"], "demand_cap");
      if (t.contains("positive_ratings")) tt.positive_ratings = get_as<int>(t["positive_ratings"], "positive_ratings");
      if (t.contains("service_time")) tt.service_time = get_as<int>(t["service_time"], "service_time");
      cfg.task_types.push_back(std::move(tt));
    }
  }
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = get_as<double>(j[key], key);
  };
  num("alpha1", cfg.alpha1);
  num("alpha2", cfg.alpha2);
  num("alpha3", cfg.alpha3);
  num("epsilon", cfg.epsilon);
  num("rho", cfg.rho);
  if (j.contains("mobilization_cost"))
    cfg.mobilization_cost = get_as<std::vector<double>>(j["mobilization_cost"], "mobilization_cost");
  if (j.contains("mobilization_cap"))
    cfg.mobilization_cap = get_as<std::vector<int>>(j["mobilization_cap"], "mobilization_cap");
  if (j.contains("budget_per_step")) {
    const auto& b = j["budget_per_step"];
    if (b.is_number())
      cfg.budget_per_step = {b.get<double>()};
    else
      cfg.budget_per_step = get_as<std::vector<double>>(b, "budget_per_step");
  }
  if (j.contains("arrival_rates"))
    cfg.arrival_rates = get_as<std::vector<double>>(j["arrival_rates"], "arrival_rates");
  if (j.contains("horizon")) cfg.horizon = get_as<int>(j["horizon"], "horizon");
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("demand_mode"))
    cfg.demand_mode = detail::parse_enum(j["demand_mode"], "demand_mode",
                                         {DemandMode::deterministic, DemandMode::poisson});
  if (j.contains("demand_form"))
    cfg.demand_form = detail::parse_enum(j["demand_form"], "demand_form",
                                         {DemandForm::exact_eq5, DemandForm::linearized_eq12});
  if (j.contains("arrival_script")) {
    if (j["arrival_script"].is_null())
      cfg.arrival_script.reset();
    else
      cfg.arrival_script = get_as<std::vector<std::vector<int>>>(j["arrival_script"], "arrival_script");
  }
  if (j.contains("outcome_model"))
    cfg.outcome_model = detail::parse_enum(
        j["outcome_model"], "outcome_model",
        {OutcomeModel::bernoulli, OutcomeModel::always_success, OutcomeModel::frozen});
  if (j.contains("rollback_on_infeasible"))
    cfg.rollback_on_infeasible = get_as<bool>(j["rollback_on_infeasible"], "rollback_on_infeasible");

  // A roster given in the file replaces the default roster entirely.
  if (j.contains("workers") || j.contains("generated_workers")) {
    cfg.workers.clear();
    cfg.generated_workers.reset();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_array()) detail::parse_fail("workers must be an array");
    for (const auto& w : j["workers"]) {
      if (!w.is_object()) detail::parse_fail("workers entries must be objects");
      detail::reject_unknown(w, {"skill", "presence", "successes", "failures"}, "workers entry");
      WorkerSpec ws;
      if (w.contains("skill")) ws.skill = get_as<int>(w["skill"], "skill");
      if (w.contains("presence"))
        ws.presence = detail::parse_enum(w["presence"], "presence", {Presence::logged_in, Presence::offline});
      if (w.contains("successes")) ws.successes = get_as<int>(w["successes"], "successes");
      if (w.contains("failures")) ws.failures = get_as<int>(w["failures"], "failures");
      cfg.workers.push_back(ws);
    }
  }
  if (j.contains("generated_workers") && !j["generated_workers"].is_null()) {
    const auto& g = j["generated_workers"];
    if (!g.is_object()) detail::parse_fail("generated_workers must be an object");
    detail::reject_unknown(g, {"logged_in", "offline", "max_history"}, "generated_workers");
    GeneratedWorkers gw;
    if (g.contains("logged_in")) gw.logged_in = get_as<std::vector<int>>(g["logged_in"], "logged_in");
    if (g.contains("offline")) gw.offline = get_as<std::vector<int>>(g["offline"], "offline");
    if (g.contains("max_history")) gw.max_history = get_as<int>(g["max_history"], "max_history");
    cfg.generated_workers = gw;
  }
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({Violation{ErrorCode::ParseError, path + ": " + e.what()}});
  }
}

// ---------------------------------------------------------------------------
// Overrides: dotted keys into the fully-populated document, e.g. "rho" or "task_types.0.price".

inline void apply_override(json& doc, std::string_view dotted_key, const json& value) {
  json* node = &doc;
  std::string_view rest = dotted_key;
  while (true) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ConfigError({Violation{ErrorCode::UnknownKey, "bad array index '" + part + "' in " + std::string(dotted_key)}});
      }
      if (idx >= node->size())
        throw ConfigError({Violation{ErrorCode::UnknownKey, "index out of range in " + std::string(dotted_key)}});
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(part)) {
      node = &(*node)[part];
    } else {
      throw ConfigError({Violation{ErrorCode::UnknownKey, "unknown override key " + std::string(dotted_key)}});
    }
    if (dot == std::string_view::npos) break;
    rest = rest.substr(dot + 1);
  }
  *node = value;
}

/// Parses an override value: JSON when it parses, a bare string otherwise.
inline json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

/// Splits "a,b,[1,2]" into top-level comma separated items (brackets protect commas).
inline std::vector<std::string> split_override_list(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : text) {
    if (ch == '[' || ch == '{') ++depth;
    if (ch == ']' || ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

// ---------------------------------------------------------------------------
// Content hash

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of the canonical (sorted-key) serialization of the config, as 16 hex digits.
inline std::string config_hash(const MarketConfig& cfg) {
  const auto h = fnv1a64(to_json_value(cfg).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline MarketConfig load_config(const std::string& path) {
  return validate_config(config_from_json(read_json_file(path)));
}

}  // namespace crowdasm
