#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cosched/errors.hpp"
#include "cosched/grouping.hpp"
#include "cosched/model.hpp"
#include "cosched/optimizer.hpp"
#include "cosched/timeline.hpp"

namespace cosched {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace detail {

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(where + ": missing required key \"" + key + "\"");
  return *it;
}

inline int parse_accel_key(const std::string& key, const std::string& where) {
  try {
    std::size_t used = 0;
    int v = std::stoi(key, &used);
    if (used != key.size() || v < 0) throw std::invalid_argument(key);
    return v;
  } catch (...) {
    throw ValidationError(where + ": key \"" + key + "\" is not an accelerator id");
  }
}

inline AccelPair parse_pair_key(const std::string& key, const std::string& where) {
  auto dash = key.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == key.size())
    throw ValidationError(where + ": key \"" + key + "\" is not a \"from-to\" pair");
  return {parse_accel_key(key.substr(0, dash), where),
          parse_accel_key(key.substr(dash + 1), where)};
}

inline std::map<int, double> parse_accel_map(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  std::map<int, double> out;
  for (auto& [key, val] : j.items()) {
    if (!val.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    out[parse_accel_key(key, where)] = val.get<double>();
  }
  return out;
}

inline std::map<AccelPair, double> parse_pair_map(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  std::map<AccelPair, double> out;
  for (auto& [key, val] : j.items()) {
    if (!val.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    out[parse_pair_key(key, where)] = val.get<double>();
  }
  return out;
}

inline ojson emit_accel_map(const std::map<int, double>& m) {
  ojson out = ojson::object();
  for (auto [a, v] : m) out[std::to_string(a)] = v;
  return out;
}

inline ojson emit_pair_map(const std::map<AccelPair, double>& m) {
  ojson out = ojson::object();
  for (auto& [pair, v] : m)
    out[std::to_string(pair.first) + "-" + std::to_string(pair.second)] = v;
  return out;
}

inline Scenario scenario_from_json(const json& j);

}  // namespace detail

/// Parses and fully validates a scenario document. Syntax errors surface as
/// ParseError with line/column; invariant violations as ValidationError
/// naming the offending element.
inline Scenario parse_scenario(const std::string& text) {
  json j = detail::parse_text(text);
  try {
    return detail::scenario_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

namespace detail {

inline Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scenario: top level must be an object");
  if (j.contains("version") && j["version"] != 1)
    throw ValidationError("scenario: unsupported version (expected 1)");

  Scenario s;
  const json& accels = detail::require(j, "accelerators", "scenario");
  if (!accels.is_array()) throw ValidationError("scenario.accelerators: expected an array");
  for (std::size_t k = 0; k < accels.size(); ++k) {
    const json& a = accels[k];
    const std::string where = "accelerators[" + std::to_string(k) + "]";
    Accelerator acc;
    acc.id = detail::require(a, "id", where).get<int>();
    acc.name = detail::require(a, "name", where).get<std::string>();
    acc.blackbox = a.value("blackbox", false);
    s.accelerators.push_back(std::move(acc));
  }

  const json& dnns = detail::require(j, "dnns", "scenario");
  if (!dnns.is_array()) throw ValidationError("scenario.dnns: expected an array");
  for (std::size_t n = 0; n < dnns.size(); ++n) {
    const json& d = dnns[n];
    const std::string dwhere = "dnns[" + std::to_string(n) + "]";
    DnnSpec spec;
    spec.name = detail::require(d, "name", dwhere).get<std::string>();
    spec.iterations = d.value("iterations", 1);
    const json& groups = detail::require(d, "groups", dwhere);
    if (!groups.is_array()) throw ValidationError(dwhere + ".groups: expected an array");
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const json& g = groups[i];
      const std::string gwhere = dwhere + ".groups[" + std::to_string(i) + "]";
      LayerGroup lg;
      lg.dnn = int(n);
      lg.index = int(i);
      lg.exec_ms = detail::parse_accel_map(detail::require(g, "exec_ms", gwhere),
                                           gwhere + ".exec_ms");
      lg.thr_gbps = detail::parse_accel_map(detail::require(g, "thr_gbps", gwhere),
                                            gwhere + ".thr_gbps");
      lg.tau_out_ms = detail::parse_pair_map(detail::require(g, "tau_out_ms", gwhere),
                                             gwhere + ".tau_out_ms");
      lg.tau_in_ms = detail::parse_pair_map(detail::require(g, "tau_in_ms", gwhere),
                                            gwhere + ".tau_in_ms");
      spec.groups.push_back(std::move(lg));
    }
    s.dnns.push_back(std::move(spec));
  }

  if (j.contains("dependencies")) {
    const json& deps = j["dependencies"];
    if (!deps.is_array()) throw ValidationError("scenario.dependencies: expected an array");
    for (const json& e : deps) {
      if (!e.is_array() || e.size() != 2)
        throw ValidationError("scenario.dependencies: each edge must be [producer, consumer]");
      s.dependencies.push_back({e[0].get<int>(), e[1].get<int>()});
    }
  }

  const json& cont = detail::require(j, "contention", "scenario");
  if (!cont.is_object()) throw ValidationError("scenario.contention: expected an object");
  for (auto& [key, val] : cont.items()) {
    const std::string cwhere = "contention." + key;
    int accel = detail::parse_accel_key(key, "scenario.contention");
    ContentionGrid grid;
    grid.req_gbps = detail::require(val, "req_gbps", cwhere).get<std::vector<double>>();
    grid.ext_gbps = detail::require(val, "ext_gbps", cwhere).get<std::vector<double>>();
    grid.factor =
        detail::require(val, "factor", cwhere).get<std::vector<std::vector<double>>>();
    s.contention.grids[accel] = std::move(grid);
  }

  s.epsilon_ms = j.value("epsilon_ms", 0.05);
  const std::string obj =
      detail::require(j, "objective", "scenario").get<std::string>();
  if (obj == "max_throughput")
    s.objective = Objective::MaxThroughput;
  else if (obj == "minmax_latency")
    s.objective = Objective::MinMaxLatency;
  else
    throw ValidationError("scenario.objective: expected \"max_throughput\" or "
                          "\"minmax_latency\", got \"" + obj + "\"");

  validate_scenario(s);
  return s;
}

}  // namespace detail

inline ojson scenario_to_json(const Scenario& s) {
  ojson j;
  j["version"] = 1;
  j["accelerators"] = ojson::array();
  for (const auto& a : s.accelerators)
    j["accelerators"].push_back({{"id", a.id}, {"name", a.name}, {"blackbox", a.blackbox}});
  j["dnns"] = ojson::array();
  for (const auto& d : s.dnns) {
    ojson dj;
    dj["name"] = d.name;
    dj["iterations"] = d.iterations;
    dj["groups"] = ojson::array();
    for (const auto& g : d.groups)
      dj["groups"].push_back({{"exec_ms", detail::emit_accel_map(g.exec_ms)},
                              {"thr_gbps", detail::emit_accel_map(g.thr_gbps)},
                              {"tau_out_ms", detail::emit_pair_map(g.tau_out_ms)},
                              {"tau_in_ms", detail::emit_pair_map(g.tau_in_ms)}});
    j["dnns"].push_back(std::move(dj));
  }
  j["dependencies"] = ojson::array();
  for (auto [p, c] : s.dependencies) j["dependencies"].push_back({p, c});
  j["contention"] = ojson::object();
  for (auto& [a, grid] : s.contention.grids)
    j["contention"][std::to_string(a)] = {{"req_gbps", grid.req_gbps},
                                          {"ext_gbps", grid.ext_gbps},
                                          {"factor", grid.factor}};
  j["epsilon_ms"] = s.epsilon_ms;
  j["objective"] = to_string(s.objective);
  return j;
}

inline std::string emit_scenario(const Scenario& s) { return scenario_to_json(s).dump(2); }

/// Raw layer array for the `group` subcommand. `index` defaults to the
/// position; flags default to the permissive side except support, which is
/// required.
inline std::vector<RawLayer> parse_raw_layers(const std::string& text) {
  json j = detail::parse_text(text);
  if (!j.is_array()) throw ValidationError("layers: top level must be an array");
  std::vector<RawLayer> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& l = j[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    RawLayer layer;
    layer.index = l.value("index", int(i));
    if (layer.index != int(i))
      throw ValidationError(where + ": index " + std::to_string(layer.index) +
                            " does not match position " + std::to_string(i));
    layer.kind = l.value("kind", std::string{});
    layer.fusible_with_next = l.value("fusible_with_next", false);
    layer.reformat_on_exit = l.value("reformat_on_exit", false);
    layer.transition_allowed_after = l.value("transition_allowed_after", true);
    const json& sup = detail::require(l, "supported_accelerators", where);
    if (!sup.is_array() || sup.empty())
      throw ValidationError(where + ".supported_accelerators: expected a non-empty array");
    for (const json& a : sup) layer.supported_accelerators.insert(a.get<int>());
    out.push_back(std::move(layer));
  }
  if (!out.empty() && out.back().fusible_with_next)
    throw ValidationError("layers: last layer must not be fusible_with_next");
  return out;
}

inline ojson boundaries_to_json(const std::vector<GroupBoundary>& bs) {
  ojson arr = ojson::array();
  for (const auto& b : bs) {
    ojson j;
    j["start_index"] = b.start_index;
    j["end_index"] = b.end_index;  // exclusive
    j["supported_accelerators"] =
        std::vector<int>(b.supported_accelerators.begin(), b.supported_accelerators.end());
    arr.push_back(std::move(j));
  }
  return ojson{{"groups", std::move(arr)}};
}

inline ojson schedule_to_json(const Schedule& sched) {
  ojson out = ojson::object();
  for (auto& [key, accel] : sched.assignment)
    out[std::to_string(key.first) + "." + std::to_string(key.second)] = accel;
  return out;
}

/// Schedule document: {"dnn.group": accelerator id}. Group indices address
/// the expanded (iteration-unrolled) group list.
inline Schedule parse_schedule(const std::string& text) {
  json j = detail::parse_text(text);
  if (!j.is_object()) throw ValidationError("schedule: top level must be an object");
  Schedule sched;
  for (auto& [key, val] : j.items()) {
    auto dot = key.find('.');
    if (dot == std::string::npos)
      throw ValidationError("schedule: key \"" + key + "\" is not \"dnn.group\"");
    int dnn = detail::parse_accel_key(key.substr(0, dot), "schedule");
    int group = detail::parse_accel_key(key.substr(dot + 1), "schedule");
    if (!val.is_number_integer())
      throw ValidationError("schedule." + key + ": expected an accelerator id");
    sched.assignment[{dnn, group}] = val.get<int>();
  }
  return sched;
}

inline ojson timeline_to_json(const Scenario& s, const Timeline& tl) {
  ojson j;
  j["feasible"] = tl.feasible;
  j["makespan_ms"] = tl.makespan_ms;
  j["dnns"] = ojson::array();
  for (int n = 0; n < s.dnn_count(); ++n) {
    ojson dj;
    dj["name"] = s.dnns[std::size_t(n)].name;
    dj["release_ms"] = tl.dnn_release_ms[std::size_t(n)];
    dj["completion_ms"] = tl.dnn_completion_ms[std::size_t(n)];
    dj["latency_ms"] = tl.dnn_latency_ms[std::size_t(n)];
    j["dnns"].push_back(std::move(dj));
  }
  j["groups"] = ojson::array();
  for (const auto& g : tl.groups) {
    ojson gj;
    gj["dnn"] = g.dnn;
    gj["group"] = g.group;
    gj["accel"] = g.accel;
    gj["start_ms"] = g.start_ms;
    gj["end_ms"] = g.end_ms;
    gj["segments"] = ojson::array();
    for (const auto& seg : g.segments)
      gj["segments"].push_back(
          {{"start_ms", seg.start_ms}, {"end_ms", seg.end_ms}, {"factor", seg.factor}});
    j["groups"].push_back(std::move(gj));
  }
  j["events_ms"] = tl.events_ms;
  if (tl.feasible) {
    j["objective_values"] = {
        {"max_throughput", objective_value(tl, Objective::MaxThroughput)},
        {"minmax_latency", objective_value(tl, Objective::MinMaxLatency)}};
    j["objective"] = {{"kind", to_string(s.objective)},
                      {"value", objective_value(tl, s.objective)}};
  } else {
    j["objective_values"] = nullptr;
    j["objective"] = nullptr;
  }
  j["violations"] = ojson::array();
  for (const auto& v : tl.violations)
    j["violations"].push_back({{"dnn_a", v.dnn_a},
                               {"group_a", v.group_a},
                               {"dnn_b", v.dnn_b},
                               {"group_b", v.group_b},
                               {"accel", v.accel},
                               {"overlap_ms", v.overlap_ms}});
  return j;
}

inline ojson optimize_result_to_json(const OptimizeResult& res) {
  ojson j;
  j["schedule"] = schedule_to_json(res.schedule);
  j["objective"] = res.objective;
  j["proven_optimal"] = res.proven_optimal;
  j["nodes"] = res.nodes_explored;
  return j;
}

inline ojson incumbent_to_json(const IncumbentRecord& inc) {
  ojson j;
  j["objective"] = inc.objective;
  j["elapsed_ms"] = inc.elapsed_ms;
  j["schedule"] = schedule_to_json(inc.schedule);
  return j;
}

}  // namespace cosched
