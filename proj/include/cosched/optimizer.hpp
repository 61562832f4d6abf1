#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cosched/errors.hpp"
#include "cosched/model.hpp"
#include "cosched/timeline.hpp"

namespace cosched {

struct OptimizeResult {
  Schedule schedule;
  Timeline timeline;
  double objective = 0.0;
  bool proven_optimal = false;
  std::uint64_t nodes_explored = 0;
  double wall_time_ms = 0.0;
};

struct IncumbentRecord {
  Schedule schedule;
  double objective = 0.0;
  double elapsed_ms = 0.0;
};

using IncumbentSink = std::function<void(const IncumbentRecord&)>;

struct OptimizeOptions {
  std::optional<double> budget_ms;
  int workers = 1;
  // Test instrumentation: called per search node with the partial flat
  // assignment (-1 for unassigned) and the node's optimistic cost bound.
  const std::function<void(const std::vector<int>&, double)>* node_hook = nullptr;
};

namespace detail {

// Internally every objective is minimized: MinMaxLatency as-is,
// MaxThroughput negated.
inline double cost_of(double objective_value, Objective o) {
  return o == Objective::MaxThroughput ? -objective_value : objective_value;
}

struct FlatIndex {
  std::vector<int> offset;  // per dnn, into the flat assignment vector
  int total = 0;

  explicit FlatIndex(const Scenario& s) {
    offset.reserve(std::size_t(s.dnn_count()));
    for (const auto& d : s.dnns) {
      offset.push_back(total);
      total += d.total_groups();
    }
  }
  int operator()(int dnn, int group) const {
    return offset[std::size_t(dnn)] + group;
  }
};

inline Schedule unflatten(const Scenario& s, const std::vector<int>& flat) {
  Schedule sched;
  FlatIndex fi(s);
  for (int n = 0; n < s.dnn_count(); ++n)
    for (int i = 0; i < s.dnns[std::size_t(n)].total_groups(); ++i)
      sched.assignment[{n, i}] = flat[std::size_t(fi(n, i))];
  return sched;
}

inline std::vector<int> flatten(const Scenario& s, const Schedule& sched) {
  FlatIndex fi(s);
  std::vector<int> flat(std::size_t(fi.total), -1);
  for (auto& [key, accel] : sched.assignment)
    flat[std::size_t(fi(key.first, key.second))] = accel;
  return flat;
}

// A fully evaluated feasible assignment. Incumbents are replaced only on a
// strict cost improvement; among equal-cost optima the first one reached in
// the fixed search order stands, which keeps the result deterministic.
struct Candidate {
  double cost = 0.0;
  std::vector<int> flat;
  Timeline timeline;
  double objective = 0.0;

  bool better_than(const Candidate& o) const { return cost < o.cost; }
};

inline std::optional<Candidate> evaluate_candidate(const Scenario& s,
                                                   const std::vector<int>& flat) {
  Schedule sched = unflatten(s, flat);
  Timeline tl = evaluate(s, sched);
  if (!tl.feasible) return std::nullopt;
  Candidate c;
  c.objective = objective_value(tl, s.objective);
  c.cost = cost_of(c.objective, s.objective);
  c.flat = flat;
  c.timeline = std::move(tl);
  return c;
}

// The cost bound and the simulator accumulate the same quantities in
// different floating-point orders, so the bound may exceed a subtree's true
// best cost by a few ulps. Pruning keeps this much headroom; exactness of
// the reported optimum is unaffected because leaves are compared bitwise.
inline double prune_slack(double cost) { return 1e-9 * (1.0 + std::abs(cost)); }

struct Variable {
  int dnn = 0;
  int group = 0;
  std::vector<int> values;   // supported accelerators, fastest first
  double min_exec_ms = 0.0;
};

// Groups in global topological order, interleaved by a static estimate of
// each group's earliest possible start (dependency release plus the prefix
// of minimum execution times). Strong schedules surface early that way.
inline std::vector<Variable> make_variables(const Scenario& s) {
  std::vector<double> release_lb(std::size_t(s.dnn_count()), 0.0);
  std::vector<double> dnn_min_total(std::size_t(s.dnn_count()), 0.0);
  for (int n = 0; n < s.dnn_count(); ++n) {
    const auto& d = s.dnns[std::size_t(n)];
    for (int i = 0; i < d.total_groups(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (auto [a, ms] : d.group_at(i).exec_ms) best = std::min(best, ms);
      dnn_min_total[std::size_t(n)] += best;
    }
  }
  // Longest path over the dependency DAG; dnn indices are not necessarily
  // topological, so relax edges until a fixed point (graph is tiny).
  for (int pass = 0; pass < s.dnn_count(); ++pass)
    for (auto [p, c] : s.dependencies)
      release_lb[std::size_t(c)] =
          std::max(release_lb[std::size_t(c)],
                   release_lb[std::size_t(p)] + dnn_min_total[std::size_t(p)]);

  struct Entry {
    double est;
    Variable var;
  };
  std::vector<Entry> entries;
  for (int n = 0; n < s.dnn_count(); ++n) {
    const auto& d = s.dnns[std::size_t(n)];
    double prefix = release_lb[std::size_t(n)];
    for (int i = 0; i < d.total_groups(); ++i) {
      const LayerGroup& g = d.group_at(i);
      Variable v{n, i, {}, 0.0};
      std::vector<std::pair<double, int>> order;
      for (auto [a, ms] : g.exec_ms) order.push_back({ms, a});
      std::sort(order.begin(), order.end());
      for (auto& [ms, a] : order) v.values.push_back(a);
      v.min_exec_ms = order.front().first;
      entries.push_back({prefix, std::move(v)});
      prefix += entries.back().var.min_exec_ms;
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.est != b.est) return a.est < b.est;
    return std::pair{a.var.dnn, a.var.group} < std::pair{b.var.dnn, b.var.group};
  });
  std::vector<Variable> vars;
  vars.reserve(entries.size());
  for (auto& e : entries) vars.push_back(std::move(e.var));
  return vars;
}

// Optimistic per-DNN completion bounds for a partial assignment: assigned
// groups at standalone speed plus their committed transitions, unassigned
// groups at their fastest accelerator with no contention and no further
// transitions. Admissible because slowdown >= 1 and tau >= 0.
struct BoundState {
  const Scenario* scenario;
  FlatIndex fi;
  std::vector<double> dnn_lb;      // current per-DNN lower bound on T_n
  std::vector<int> flat;           // -1 where unassigned

  explicit BoundState(const Scenario& s) : scenario(&s), fi(s) {
    dnn_lb.resize(std::size_t(s.dnn_count()), 0.0);
    for (int n = 0; n < s.dnn_count(); ++n) {
      const auto& d = s.dnns[std::size_t(n)];
      for (int i = 0; i < d.total_groups(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (auto [a, ms] : d.group_at(i).exec_ms) best = std::min(best, ms);
        dnn_lb[std::size_t(n)] += best;
      }
    }
    flat.assign(std::size_t(fi.total), -1);
  }

  // Delta applied to dnn_lb when assigning `accel` to (n, i); returned so
  // the caller can undo. Variables of one DNN are visited in index order,
  // so the predecessor's accelerator is already fixed when it matters.
  struct Applied {
    double lb_delta = 0.0;
  };

  Applied assign(const Variable& v, double var_min_exec, int accel) {
    const auto& d = scenario->dnns[std::size_t(v.dnn)];
    const LayerGroup& g = d.group_at(v.group);
    Applied ap;
    ap.lb_delta = g.exec_ms.at(accel) - var_min_exec;
    if (v.group > 0) {
      int prev = flat[std::size_t(fi(v.dnn, v.group - 1))];
      if (prev >= 0 && prev != accel) {
        AccelPair pair{prev, accel};
        ap.lb_delta += d.group_at(v.group - 1).tau_out_ms.at(pair) +
                       g.tau_in_ms.at(pair);
      }
    }
    dnn_lb[std::size_t(v.dnn)] += ap.lb_delta;
    flat[std::size_t(fi(v.dnn, v.group))] = accel;
    return ap;
  }

  void undo(const Variable& v, const Applied& ap) {
    dnn_lb[std::size_t(v.dnn)] -= ap.lb_delta;
    flat[std::size_t(fi(v.dnn, v.group))] = -1;
  }

  double cost_bound() const {
    if (scenario->objective == Objective::MaxThroughput) {
      double sum = 0.0;
      for (double lb : dnn_lb) sum += 1.0 / lb;
      return -sum;
    }
    double worst = 0.0;
    for (double lb : dnn_lb) worst = std::max(worst, lb);
    return worst;
  }
};

struct SearchClock {
  std::chrono::steady_clock::time_point start;
  std::optional<double> budget_ms;

  SearchClock() : start(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
  bool expired() const { return budget_ms && elapsed_ms() >= *budget_ms; }
};

// Delivery gate for anytime incumbents: forwards a candidate only when it
// strictly improves (canonical order) on everything delivered so far.
struct DeliveryGate {
  std::mutex mu;
  std::optional<Candidate> best;
  const IncumbentSink* sink = nullptr;
  const Scenario* scenario = nullptr;
  const SearchClock* clock = nullptr;

  void offer(const Candidate& c) {
    if (!sink || !*sink) return;
    std::lock_guard<std::mutex> lock(mu);
    if (best && !c.better_than(*best)) return;
    best = c;
    (*sink)({unflatten(*scenario, c.flat), c.objective, clock->elapsed_ms()});
  }
};

}  // namespace detail

/// Rebuilds the scenario with chain dependencies along a stable topological
/// order of its DNNs, so every DNN runs strictly after the previous one.
/// This is the evaluation context of the serial-fastest baseline.
inline Scenario serialize_dnns(const Scenario& s) {
  std::vector<int> indeg(std::size_t(s.dnn_count()), 0);
  for (auto [p, c] : s.dependencies) indeg[std::size_t(c)]++;
  std::vector<int> order;
  std::vector<bool> done(std::size_t(s.dnn_count()), false);
  while (int(order.size()) < s.dnn_count()) {
    for (int n = 0; n < s.dnn_count(); ++n) {
      if (done[std::size_t(n)] || indeg[std::size_t(n)] != 0) continue;
      order.push_back(n);
      done[std::size_t(n)] = true;
      for (auto [p, c] : s.dependencies)
        if (p == n) indeg[std::size_t(c)]--;
      break;
    }
  }
  Scenario out = s;
  for (std::size_t k = 1; k < order.size(); ++k) {
    std::pair<int, int> edge{order[k - 1], order[k]};
    if (std::find(out.dependencies.begin(), out.dependencies.end(), edge) ==
        out.dependencies.end())
      out.dependencies.push_back(edge);
  }
  return out;
}

/// Reference schedules to compare optimized results against:
///  - "serial-fastest": every DNN wholly on its fastest accelerator; meant to
///    be evaluated under serialize_dnns(scenario) so DNNs run one at a time.
///  - "naive-concurrent/<names>": each whole-DNN-to-accelerator mapping that
///    is overlap-feasible under the scenario as given (2+ accelerators only).
inline std::vector<std::pair<std::string, Schedule>> baselines(const Scenario& s) {
  std::vector<std::pair<std::string, Schedule>> out;

  // Accelerators able to run *every* group of a DNN.
  auto whole_dnn_support = [&](const DnnSpec& d) {
    std::vector<int> common;
    for (int a = 0; a < s.accel_count(); ++a) {
      bool ok = true;
      for (const auto& g : d.groups)
        if (!g.supports(a)) {
          ok = false;
          break;
        }
      if (ok) common.push_back(a);
    }
    return common;
  };

  std::vector<std::vector<int>> support;
  bool whole_possible = true;
  for (const auto& d : s.dnns) {
    support.push_back(whole_dnn_support(d));
    if (support.back().empty()) whole_possible = false;
  }
  if (!whole_possible) return out;

  auto whole_schedule = [&](const std::vector<int>& accel_per_dnn) {
    Schedule sched;
    for (int n = 0; n < s.dnn_count(); ++n)
      for (int i = 0; i < s.dnns[std::size_t(n)].total_groups(); ++i)
        sched.assignment[{n, i}] = accel_per_dnn[std::size_t(n)];
    return sched;
  };

  std::vector<int> fastest(std::size_t(s.dnn_count()), -1);
  for (int n = 0; n < s.dnn_count(); ++n) {
    const auto& d = s.dnns[std::size_t(n)];
    double best = std::numeric_limits<double>::infinity();
    for (int a : support[std::size_t(n)]) {
      double total = 0.0;
      for (int i = 0; i < d.total_groups(); ++i) total += d.group_at(i).exec_ms.at(a);
      if (total < best) {
        best = total;
        fastest[std::size_t(n)] = a;
      }
    }
  }
  out.push_back({"serial-fastest", whole_schedule(fastest)});

  if (s.accel_count() >= 2) {
    std::vector<int> combo(std::size_t(s.dnn_count()), 0);
    std::vector<std::size_t> pos(std::size_t(s.dnn_count()), 0);
    while (true) {
      for (int n = 0; n < s.dnn_count(); ++n)
        combo[std::size_t(n)] = support[std::size_t(n)][pos[std::size_t(n)]];
      Schedule sched = whole_schedule(combo);
      if (evaluate(s, sched).feasible) {
        std::string label = "naive-concurrent/";
        for (int n = 0; n < s.dnn_count(); ++n) {
          if (n) label += ",";
          label += s.accelerators[std::size_t(combo[std::size_t(n)])].name;
        }
        out.push_back({label, std::move(sched)});
      }
      int n = s.dnn_count() - 1;
      while (n >= 0 && ++pos[std::size_t(n)] == support[std::size_t(n)].size()) {
        pos[std::size_t(n)] = 0;
        --n;
      }
      if (n < 0) break;
    }
  }
  return out;
}

namespace detail {

struct SearchShared {
  const Scenario* scenario;
  const std::vector<Variable>* vars;
  std::optional<Candidate> init;  // best overlap-feasible baseline, if any
  DeliveryGate gate;
  SearchClock clock;
  std::atomic<bool> stopped{false};
  const std::function<void(const std::vector<int>&, double)>* node_hook = nullptr;
};

// Depth-first search below one prefix. Pruning compares against the task's
// own incumbent only (seeded from the baseline incumbent), never against
// other tasks, so the set of explored nodes does not depend on how tasks are
// scheduled onto workers.
struct TaskSearch {
  SearchShared* shared;
  BoundState state;
  std::optional<Candidate> best;
  std::uint64_t nodes = 0;
  std::uint64_t check_counter = 0;

  explicit TaskSearch(SearchShared* sh) : shared(sh), state(*sh->scenario) {
    best = sh->init;
  }

  bool out_of_time() {
    if ((++check_counter & 0x3f) == 0 && shared->clock.expired())
      shared->stopped.store(true, std::memory_order_relaxed);
    return shared->stopped.load(std::memory_order_relaxed);
  }

  bool prunable(double bound_cost) const {
    return best && bound_cost >= best->cost + prune_slack(best->cost);
  }

  // Returns false when the subtree was abandoned because of the budget.
  bool dfs(std::size_t depth) {
    if (out_of_time()) return false;
    if (depth == shared->vars->size()) {
      auto cand = evaluate_candidate(*shared->scenario, state.flat);
      if (cand && (!best || cand->better_than(*best))) {
        best = std::move(*cand);
        shared->gate.offer(*best);
      }
      return true;
    }
    const Variable& v = (*shared->vars)[depth];
    bool complete = true;
    for (int accel : v.values) {
      auto ap = state.assign(v, v.min_exec_ms, accel);
      ++nodes;
      double bound = state.cost_bound();
      if (shared->node_hook && *shared->node_hook)
        (*shared->node_hook)(state.flat, bound);
      if (!prunable(bound)) {
        if (!dfs(depth + 1)) complete = false;
      }
      state.undo(v, ap);
      if (!complete && shared->stopped.load(std::memory_order_relaxed)) break;
    }
    return complete;
  }
};

}  // namespace detail

/// Exact search for the optimal schedule under the scenario's objective and
/// overlap constraint. Branch-and-bound over per-group accelerator choices;
/// the incumbent starts from the best overlap-feasible baseline, so the
/// result is never worse than any feasible baseline. Incumbents improve
/// strictly; among equal-objective optima the first one reached in the fixed
/// search order stands, so the result and the node count depend only on the
/// instance.
///
/// The tree is split into a fixed set of subtree tasks derived from the
/// instance alone; `workers` only sets how many threads process them, so
/// node counts and results do not depend on the worker count.
inline OptimizeResult optimize_anytime(const Scenario& scenario, OptimizeOptions opts,
                                       const IncumbentSink& sink) {
  validate_scenario(scenario);
  detail::SearchShared shared;
  shared.scenario = &scenario;
  shared.clock.budget_ms = opts.budget_ms;
  shared.node_hook = opts.node_hook;
  shared.gate.sink = &sink;
  shared.gate.scenario = &scenario;
  shared.gate.clock = &shared.clock;

  auto vars = detail::make_variables(scenario);
  shared.vars = &vars;

  for (auto& [label, sched] : baselines(scenario)) {
    Timeline tl = evaluate(scenario, sched);
    if (!tl.feasible) continue;
    detail::Candidate c;
    c.objective = objective_value(tl, scenario.objective);
    c.cost = detail::cost_of(c.objective, scenario.objective);
    c.flat = detail::flatten(scenario, sched);
    c.timeline = std::move(tl);
    if (!shared.init || c.better_than(*shared.init)) shared.init = std::move(c);
  }
  if (shared.init) shared.gate.offer(*shared.init);

  // Fixed task split: enumerate assignments of the first few variables so
  // several independent subtrees exist. The depth depends on the instance
  // only, never on the worker count.
  std::size_t split_depth = 0;
  std::size_t width = 1;
  while (split_depth < vars.size() && split_depth < 4 && width < 16) {
    width *= vars[split_depth].values.size();
    ++split_depth;
  }

  struct Task {
    std::vector<int> prefix;  // accelerator per variable [0, split_depth)
  };
  std::vector<Task> tasks;
  std::uint64_t prefix_nodes = 0;
  bool prefix_truncated = false;
  {
    detail::BoundState probe(scenario);
    std::vector<int> prefix;
    auto enumerate = [&](auto&& self, std::size_t depth) -> void {
      if (shared.clock.expired()) {
        prefix_truncated = true;
        return;
      }
      if (depth == split_depth) {
        tasks.push_back({prefix});
        return;
      }
      const detail::Variable& v = vars[depth];
      for (int accel : v.values) {
        auto ap = probe.assign(v, v.min_exec_ms, accel);
        ++prefix_nodes;
        bool keep = true;
        if (shared.init) {
          double bound = probe.cost_bound();
          if (bound >= shared.init->cost + detail::prune_slack(shared.init->cost))
            keep = false;
        }
        if (keep) {
          prefix.push_back(accel);
          self(self, depth + 1);
          prefix.pop_back();
        }
        probe.undo(v, ap);
      }
    };
    enumerate(enumerate, 0);
  }

  std::vector<detail::TaskSearch> searches;
  searches.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) searches.emplace_back(&shared);
  std::vector<char> completed(tasks.size(), 0);

  auto run_task = [&](std::size_t ti) {
    detail::TaskSearch& ts = searches[ti];
    std::vector<detail::BoundState::Applied> applied;
    for (std::size_t d = 0; d < split_depth; ++d)
      applied.push_back(
          ts.state.assign(vars[d], vars[d].min_exec_ms, tasks[ti].prefix[d]));
    completed[ti] = ts.dfs(split_depth) ? 1 : 0;
    for (std::size_t d = split_depth; d-- > 0;)
      ts.state.undo(vars[d], applied[d]);
  };

  int workers = std::max(1, opts.workers);
  if (workers <= 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (shared.clock.expired()) break;
      run_task(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        if (shared.clock.expired()) continue;  // still mark remaining incomplete
        run_task(i);
      }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(workers, int(tasks.size()));
    pool.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  OptimizeResult res;
  res.nodes_explored = prefix_nodes;
  std::optional<detail::Candidate> best = shared.init;
  bool all_complete = !prefix_truncated;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    res.nodes_explored += searches[i].nodes;
    if (!completed[i]) all_complete = false;
    if (searches[i].best &&
        (!best || searches[i].best->better_than(*best)))
      best = searches[i].best;
  }

  if (!best) {
    if (all_complete)
      throw NoFeasibleScheduleError(
          "no feasible schedule: every total assignment violates the overlap "
          "constraint or support sets");
    throw NoFeasibleScheduleError(
        "no feasible schedule found within the time budget (search incomplete)");
  }

  res.schedule = detail::unflatten(scenario, best->flat);
  res.timeline = best->timeline;
  res.objective = best->objective;
  res.proven_optimal = all_complete;
  res.wall_time_ms = shared.clock.elapsed_ms();
  return res;
}

inline OptimizeResult optimize(const Scenario& scenario, OptimizeOptions opts = {}) {
  static const IncumbentSink no_sink;
  return optimize_anytime(scenario, opts, no_sink);
}

/// Exhaustive enumeration of every total assignment; the test oracle for
/// optimize. Guarded to assignment spaces of at most 2^20.
inline OptimizeResult brute_force(const Scenario& scenario) {
  validate_scenario(scenario);
  detail::FlatIndex fi(scenario);
  std::vector<std::vector<int>> values;
  double space = 1.0;
  for (int n = 0; n < scenario.dnn_count(); ++n) {
    const auto& d = scenario.dnns[std::size_t(n)];
    for (int i = 0; i < d.total_groups(); ++i) {
      std::vector<int> v;
      for (auto [a, ms] : d.group_at(i).exec_ms) v.push_back(a);
      space *= double(v.size());
      values.push_back(std::move(v));
    }
  }
  if (space > double(1 << 20))
    throw SpaceTooLargeError("assignment space exceeds 2^20; refusing to enumerate");

  detail::SearchClock clock;
  std::optional<detail::Candidate> best;
  std::vector<std::size_t> pos(values.size(), 0);
  std::vector<int> flat(values.size(), 0);
  std::uint64_t evaluated = 0;
  while (true) {
    for (std::size_t k = 0; k < values.size(); ++k) flat[k] = values[k][pos[k]];
    ++evaluated;
    auto cand = detail::evaluate_candidate(scenario, flat);
    if (cand && (!best || cand->better_than(*best))) best = std::move(*cand);
    std::size_t k = values.size();
    while (k-- > 0) {
      if (++pos[k] < values[k].size()) break;
      pos[k] = 0;
      if (k == 0) {
        if (!best)
          throw NoFeasibleScheduleError(
              "no feasible schedule: every total assignment violates the "
              "overlap constraint or support sets");
        OptimizeResult res;
        res.schedule = detail::unflatten(scenario, best->flat);
        res.timeline = best->timeline;
        res.objective = best->objective;
        res.proven_optimal = true;
        res.nodes_explored = evaluated;
        res.wall_time_ms = clock.elapsed_ms();
        return res;
      }
    }
  }
}

struct DynamicPhase {
  Scenario scenario;
  double dwell_ms = 0.0;
};

struct DynamicPhaseReport {
  std::vector<IncumbentRecord> incumbents;
  double steady_state_objective = 0.0;
  bool proven_optimal = false;
  std::optional<double> time_to_optimal_ms;
};

/// Replays a sequence of scenario changes: each phase runs a fresh anytime
/// search (no state carries over) within min(dwell, budget) and reports its
/// incumbent trace plus, when the search finished, the time to optimality.
inline std::vector<DynamicPhaseReport> run_dynamic(
    const std::vector<DynamicPhase>& phases,
    std::optional<double> budget_per_scenario_ms = std::nullopt, int workers = 1) {
  if (phases.empty()) throw DomainError("run_dynamic: empty phase sequence");
  std::vector<DynamicPhaseReport> reports;
  for (const auto& phase : phases) {
    OptimizeOptions opts;
    opts.workers = workers;
    opts.budget_ms = phase.dwell_ms;
    if (budget_per_scenario_ms)
      opts.budget_ms = std::min(*opts.budget_ms, *budget_per_scenario_ms);
    DynamicPhaseReport rep;
    IncumbentSink sink = [&rep](const IncumbentRecord& inc) {
      rep.incumbents.push_back(inc);
    };
    OptimizeResult res = optimize_anytime(phase.scenario, opts, sink);
    rep.steady_state_objective = res.objective;
    rep.proven_optimal = res.proven_optimal;
    if (res.proven_optimal) rep.time_to_optimal_ms = res.wall_time_ms;
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace cosched
