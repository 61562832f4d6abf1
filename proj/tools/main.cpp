// Command-line front end: grouping, schedule simulation, exact optimization,
// baseline listing, dynamic scenario replay, and fixture generation.
//
// Exit codes: 0 success, 1 domain error (no feasible schedule, invariant
// violations), 2 usage or parse error. Machine output goes to stdout as a
// single JSON document; diagnostics and incumbent streams go to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cosched/fixture_gen.hpp"
#include "cosched/gantt.hpp"
#include "cosched/grouping.hpp"
#include "cosched/model.hpp"
#include "cosched/optimizer.hpp"
#include "cosched/scenario_json.hpp"
#include "cosched/timeline.hpp"

namespace {

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write file: " + path);
  out << content;
}

struct CommonFlags {
  std::string scenario_path;
  std::string objective;
  double epsilon_ms = -1.0;
};

void add_scenario_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--scenario", flags.scenario_path, "scenario JSON file")->required();
  cmd->add_option("--objective", flags.objective,
                  "override the scenario objective (max_throughput|minmax_latency)")
      ->check(CLI::IsMember({"max_throughput", "minmax_latency"}));
  cmd->add_option("--epsilon-ms", flags.epsilon_ms,
                  "override the scenario overlap tolerance");
}

cosched::Scenario load_scenario(const CommonFlags& flags) {
  cosched::Scenario s = cosched::parse_scenario(read_file(flags.scenario_path));
  if (!flags.objective.empty())
    s.objective = flags.objective == "max_throughput"
                      ? cosched::Objective::MaxThroughput
                      : cosched::Objective::MinMaxLatency;
  if (flags.epsilon_ms >= 0.0) s.epsilon_ms = flags.epsilon_ms;
  return s;
}

void print_json(const cosched::ojson& j) { std::cout << j.dump(2) << "\n"; }

int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : int(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contention-aware concurrent DNN schedule optimizer"};
  app.require_subcommand(1);

  // group
  std::string layers_path;
  CLI::App* cmd_group = app.add_subcommand("group", "collapse raw layers into schedulable groups");
  cmd_group->add_option("--layers", layers_path, "raw layer JSON array")->required();

  // simulate
  CommonFlags sim_flags;
  std::string schedule_path, gantt_path;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "evaluate a schedule into a timeline");
  add_scenario_flags(cmd_sim, sim_flags);
  cmd_sim->add_option("--schedule", schedule_path, "schedule JSON file")->required();
  cmd_sim->add_option("--gantt", gantt_path, "write an SVG Gantt chart here");

  // optimize
  CommonFlags opt_flags;
  double budget_ms = -1.0;
  int workers = default_workers();
  bool anytime = false;
  std::string trace_path;
  CLI::App* cmd_opt = app.add_subcommand("optimize", "find the optimal schedule");
  add_scenario_flags(cmd_opt, opt_flags);
  cmd_opt->add_option("--budget-ms", budget_ms, "wall-clock budget for the search");
  cmd_opt->add_option("--workers", workers, "worker threads for the search");
  cmd_opt->add_flag("--anytime", anytime, "stream improving incumbents to stderr as JSON lines");
  cmd_opt->add_option("--trace", trace_path, "write the incumbent trace JSON here");

  // baselines
  CommonFlags base_flags;
  CLI::App* cmd_base = app.add_subcommand("baselines", "list reference schedules and objectives");
  add_scenario_flags(cmd_base, base_flags);

  // dynamic
  std::string sequence_path;
  double dyn_budget_ms = -1.0;
  int dyn_workers = default_workers();
  CLI::App* cmd_dyn = app.add_subcommand("dynamic", "replay a sequence of scenario changes");
  cmd_dyn->add_option("--sequence", sequence_path, "phase sequence JSON file")->required();
  cmd_dyn->add_option("--budget-ms", dyn_budget_ms, "per-phase solver budget");
  cmd_dyn->add_option("--workers", dyn_workers, "worker threads for the search");

  // genfixture
  cosched::FixtureParams fix;
  std::string fix_objective;
  CLI::App* cmd_fix = app.add_subcommand("genfixture", "emit a seeded random scenario");
  cmd_fix->add_option("--seed", fix.seed, "generator seed")->required();
  cmd_fix->add_option("--accels", fix.accels, "number of accelerators");
  cmd_fix->add_option("--dnns", fix.dnns, "number of DNNs (0 = random 2-3)");
  cmd_fix->add_option("--min-groups", fix.min_groups, "minimum groups per DNN");
  cmd_fix->add_option("--max-groups", fix.max_groups, "maximum groups per DNN");
  cmd_fix->add_option("--max-total-groups", fix.max_total_groups, "cap on expanded groups");
  cmd_fix->add_flag("--identity-contention", fix.identity_contention,
                    "emit factor-1 contention grids");
  cmd_fix->add_option("--objective", fix_objective, "force the objective")
      ->check(CLI::IsMember({"max_throughput", "minmax_latency"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_group->parsed()) {
      auto layers = cosched::parse_raw_layers(read_file(layers_path));
      print_json(cosched::boundaries_to_json(cosched::group_layers(layers)));
      return 0;
    }

    if (cmd_sim->parsed()) {
      cosched::Scenario s = load_scenario(sim_flags);
      cosched::Schedule sched = cosched::parse_schedule(read_file(schedule_path));
      auto violations = cosched::validate_schedule(s, sched);
      if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "schedule violation: " << v << "\n";
        return 1;
      }
      cosched::Timeline tl = cosched::evaluate(s, sched);
      if (!gantt_path.empty()) write_file(gantt_path, cosched::render_gantt_svg(s, tl));
      print_json(cosched::timeline_to_json(s, tl));
      return 0;
    }

    if (cmd_opt->parsed()) {
      cosched::Scenario s = load_scenario(opt_flags);
      cosched::OptimizeOptions opts;
      if (budget_ms >= 0.0) opts.budget_ms = budget_ms;
      opts.workers = workers;
      std::vector<cosched::IncumbentRecord> trace;
      cosched::IncumbentSink sink = [&](const cosched::IncumbentRecord& inc) {
        trace.push_back(inc);
        if (anytime) std::cerr << cosched::incumbent_to_json(inc).dump() << "\n";
      };
      cosched::OptimizeResult res = cosched::optimize_anytime(s, opts, sink);
      if (!trace_path.empty()) {
        cosched::ojson tj;
        tj["incumbents"] = cosched::ojson::array();
        for (const auto& inc : trace) tj["incumbents"].push_back(cosched::incumbent_to_json(inc));
        write_file(trace_path, tj.dump(2) + "\n");
      }
      std::cerr << "search: " << res.nodes_explored << " nodes in " << res.wall_time_ms
                << " ms\n";
      print_json(cosched::optimize_result_to_json(res));
      return 0;
    }

    if (cmd_base->parsed()) {
      cosched::Scenario s = load_scenario(base_flags);
      cosched::Scenario serialized = cosched::serialize_dnns(s);
      cosched::ojson out;
      out["baselines"] = cosched::ojson::array();
      for (auto& [label, sched] : cosched::baselines(s)) {
        // serial-fastest is defined under serialized execution; the
        // concurrent mappings are evaluated as-is.
        const cosched::Scenario& ctx = label == "serial-fastest" ? serialized : s;
        cosched::Timeline tl = cosched::evaluate(ctx, sched);
        cosched::ojson bj;
        bj["label"] = label;
        bj["schedule"] = cosched::schedule_to_json(sched);
        bj["objective"] = cosched::objective_value(tl, s.objective);
        bj["latencies_ms"] = tl.dnn_latency_ms;
        bj["eq11_feasible_concurrent"] =
            label == "serial-fastest" ? cosched::evaluate(s, sched).feasible : true;
        out["baselines"].push_back(std::move(bj));
      }
      print_json(out);
      return 0;
    }

    if (cmd_dyn->parsed()) {
      cosched::json seq = cosched::detail::parse_text(read_file(sequence_path));
      std::vector<cosched::DynamicPhase> phases;
      if (!seq.is_object() || !seq.contains("phases") || !seq["phases"].is_array())
        throw cosched::ValidationError("sequence: expected {\"phases\": [...]}");
      for (const auto& pj : seq["phases"]) {
        cosched::DynamicPhase phase;
        if (pj.contains("scenario_file"))
          phase.scenario =
              cosched::parse_scenario(read_file(pj["scenario_file"].get<std::string>()));
        else if (pj.contains("scenario"))
          phase.scenario = cosched::detail::scenario_from_json(pj["scenario"]);
        else
          throw cosched::ValidationError("sequence phase: needs scenario or scenario_file");
        phase.dwell_ms = pj.value("dwell_ms", 10000.0);
        phases.push_back(std::move(phase));
      }
      std::optional<double> budget;
      if (dyn_budget_ms >= 0.0) budget = dyn_budget_ms;
      auto reports = cosched::run_dynamic(phases, budget, dyn_workers);
      cosched::ojson out;
      out["phases"] = cosched::ojson::array();
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        cosched::ojson rj;
        rj["phase"] = i;
        rj["dwell_ms"] = phases[i].dwell_ms;
        rj["steady_state_objective"] = r.steady_state_objective;
        rj["proven_optimal"] = r.proven_optimal;
        if (r.time_to_optimal_ms)
          rj["time_to_optimal_ms"] = *r.time_to_optimal_ms;
        else
          rj["time_to_optimal_ms"] = nullptr;
        rj["incumbents"] = cosched::ojson::array();
        for (const auto& inc : r.incumbents)
          rj["incumbents"].push_back(cosched::incumbent_to_json(inc));
        out["phases"].push_back(std::move(rj));
      }
      print_json(out);
      return 0;
    }

    if (cmd_fix->parsed()) {
      cosched::Scenario s = cosched::make_random_scenario(fix);
      if (!fix_objective.empty())
        s.objective = fix_objective == "max_throughput"
                          ? cosched::Objective::MaxThroughput
                          : cosched::Objective::MinMaxLatency;
      std::cout << cosched::emit_scenario(s) << "\n";
      return 0;
    }
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cosched::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const cosched::NoFeasibleScheduleError& e) {
    std::cerr << "no feasible schedule: " << e.what() << "\n";
    return 1;
  } catch (const cosched::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
