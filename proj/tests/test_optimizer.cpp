#include <doctest.h>

#include <cmath>
#include <set>

#include "cosched/fixture_gen.hpp"
#include "cosched/optimizer.hpp"
#include "test_fixtures.hpp"

using namespace cosched;

TEST_CASE("one DNN on one accelerator has exactly one baseline") {
  Scenario s = fixtures::googlenet_scenario();
  s.accelerators = {{0, "GPU", false}};
  for (auto& g : s.dnns[0].groups) {
    g.exec_ms.erase(1);
    g.thr_gbps.erase(1);
    g.tau_out_ms.clear();
    g.tau_in_ms.clear();
  }
  s.contention.grids.erase(1);
  validate_scenario(s);
  auto base = baselines(s);
  REQUIRE(base.size() == 1);
  CHECK(base[0].first == "serial-fastest");
  CHECK(validate_schedule(s, base[0].second).empty());
}

TEST_CASE("two DNNs on two accelerators: serial-fastest plus feasible whole mappings") {
  Scenario s = fixtures::two_layer_contention_scenario();
  auto base = baselines(s);
  // Same-accelerator mappings collide and are dropped; the two split
  // mappings stay.
  REQUIRE(base.size() == 3);
  CHECK(base[0].first == "serial-fastest");
  CHECK(base[1].first == "naive-concurrent/A,B");
  CHECK(base[2].first == "naive-concurrent/B,A");
  for (auto& [label, sched] : base) CHECK(validate_schedule(s, sched).empty());
}

TEST_CASE("single DNN: optimizer equals exhaustive enumeration") {
  Scenario s = fixtures::googlenet_scenario();
  OptimizeResult opt = optimize(s);
  OptimizeResult bf = brute_force(s);
  CHECK(opt.objective == bf.objective);
  CHECK(opt.schedule == bf.schedule);
  CHECK(opt.proven_optimal);
  // With identity contention there is no peer pressure, so the all-GPU
  // assignment (every group's fastest unit, no transitions) must win.
  CHECK(opt.schedule == fixtures::all_on(s, 0));
  CHECK(opt.objective == doctest::Approx(2.32).epsilon(1e-9));
}

TEST_CASE("crossed-transition fixture: splitting strictly beats every whole mapping") {
  Scenario s = fixtures::crossed_scenario();
  OptimizeResult bf = brute_force(s);
  OptimizeResult opt = optimize(s);
  CHECK(opt.objective == bf.objective);
  CHECK(opt.schedule == bf.schedule);  // unique optimum, no tie involved

  Schedule crossed;
  crossed.assignment[{0, 0}] = 0;
  crossed.assignment[{0, 1}] = 1;
  crossed.assignment[{1, 0}] = 1;
  crossed.assignment[{1, 1}] = 0;
  CHECK(opt.schedule == crossed);
  CHECK(opt.objective == doctest::Approx(15.1).epsilon(1e-12));

  for (auto& [label, sched] : baselines(s)) {
    Timeline tl = evaluate(s, sched);
    if (!tl.feasible) continue;
    double base_obj = objective_value(tl, s.objective);
    CHECK(opt.objective <= 0.9 * base_obj);  // at least 10% better
  }
}

TEST_CASE("when transitions are hostile the optimizer returns a baseline mapping") {
  Scenario s = fixtures::transition_hostile_scenario();
  OptimizeResult opt = optimize(s);
  Schedule expected;
  expected.assignment[{0, 0}] = 0;
  expected.assignment[{0, 1}] = 0;
  expected.assignment[{1, 0}] = 1;
  expected.assignment[{1, 1}] = 1;
  CHECK(opt.schedule == expected);
  bool found = false;
  for (auto& [label, sched] : baselines(s))
    if (sched == opt.schedule) found = true;
  CHECK(found);
}

TEST_CASE("oracle equivalence on the seeded random population") {
  int infeasible = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Scenario s = make_random_scenario({seed});
    OptimizeResult bf, opt;
    bool bf_infeasible = false, opt_infeasible = false;
    try {
      bf = brute_force(s);
    } catch (const NoFeasibleScheduleError&) {
      bf_infeasible = true;
    }
    try {
      opt = optimize(s);
    } catch (const NoFeasibleScheduleError&) {
      opt_infeasible = true;
    }
    REQUIRE(bf_infeasible == opt_infeasible);
    if (bf_infeasible) {
      ++infeasible;
      continue;
    }
    // Exact objective agreement; schedules may differ only on objective ties,
    // in which case both evaluate to the same cost by construction.
    CHECK(opt.objective == bf.objective);
    CHECK(opt.proven_optimal);
    CHECK(bf.proven_optimal);
  }
  // The population should be dominated by solvable instances.
  CHECK(infeasible < 20);
}

TEST_CASE("optimizer is never worse than any feasible baseline") {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    Scenario s = make_random_scenario({seed});
    OptimizeResult opt;
    try {
      opt = optimize(s);
    } catch (const NoFeasibleScheduleError&) {
      continue;
    }
    CHECK(validate_schedule(s, opt.schedule).empty());
    for (auto& [label, sched] : baselines(s)) {
      CHECK(validate_schedule(s, sched).empty());
      Timeline tl = evaluate(s, sched);
      if (!tl.feasible) continue;
      double base_obj = objective_value(tl, s.objective);
      if (s.objective == Objective::MinMaxLatency)
        CHECK(opt.objective <= base_obj);
      else
        CHECK(opt.objective >= base_obj);
    }
  }
}

TEST_CASE("anytime search: improving incumbents, final equals batch") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Scenario s = make_random_scenario({seed});
    std::vector<IncumbentRecord> trace;
    IncumbentSink sink = [&trace](const IncumbentRecord& inc) { trace.push_back(inc); };
    OptimizeResult any, batch;
    bool infeasible = false;
    try {
      any = optimize_anytime(s, {}, sink);
      batch = optimize(s);
    } catch (const NoFeasibleScheduleError&) {
      infeasible = true;
    }
    if (infeasible) continue;
    REQUIRE(!trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k) {
      if (s.objective == Objective::MinMaxLatency)
        CHECK(trace[k].objective < trace[k - 1].objective);
      else
        CHECK(trace[k].objective > trace[k - 1].objective);
    }
    CHECK(trace.back().schedule == any.schedule);
    CHECK(trace.back().objective == any.objective);
    CHECK(any.schedule == batch.schedule);
    CHECK(any.objective == batch.objective);
    CHECK(any.nodes_explored == batch.nodes_explored);
  }
}

TEST_CASE("anytime with a zero budget returns exactly the baseline incumbent") {
  Scenario s = fixtures::crossed_scenario();
  std::vector<IncumbentRecord> trace;
  IncumbentSink sink = [&trace](const IncumbentRecord& inc) { trace.push_back(inc); };
  OptimizeOptions opts;
  opts.budget_ms = 0.0;
  OptimizeResult res = optimize_anytime(s, opts, sink);
  REQUIRE(trace.size() == 1);
  CHECK(!res.proven_optimal);
  CHECK(res.schedule == trace[0].schedule);
  // The baseline incumbent is the best feasible whole-DNN mapping.
  bool is_baseline = false;
  for (auto& [label, sched] : baselines(s))
    if (sched == res.schedule) is_baseline = true;
  CHECK(is_baseline);
}

TEST_CASE("worker count changes neither the result nor the node count") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Scenario s = make_random_scenario({seed});
    OptimizeResult a, b;
    bool infeasible = false;
    try {
      OptimizeOptions one;
      one.workers = 1;
      a = optimize(s, one);
      OptimizeOptions four;
      four.workers = 4;
      b = optimize(s, four);
    } catch (const NoFeasibleScheduleError&) {
      infeasible = true;
    }
    if (infeasible) continue;
    CHECK(a.schedule == b.schedule);
    CHECK(a.objective == b.objective);
    CHECK(a.nodes_explored == b.nodes_explored);
  }
}

TEST_CASE("brute force refuses oversized spaces and flags infeasible ones") {
  Scenario s = fixtures::googlenet_scenario();
  s.dnns[0].iterations = 3;  // 30 groups x 2 accelerators > 2^20
  validate_scenario(s);
  CHECK_THROWS_AS(brute_force(s), SpaceTooLargeError);

  Scenario overlap = fixtures::forced_overlap_scenario();
  CHECK_THROWS_AS(brute_force(overlap), NoFeasibleScheduleError);
  CHECK_THROWS_AS(optimize(overlap), NoFeasibleScheduleError);
}

TEST_CASE("scaling every time quantity by two scales latencies and keeps the argmin") {
  for (std::uint64_t seed = 40; seed < 70; ++seed) {
    Scenario s = make_random_scenario({seed});
    Scenario scaled = s;
    for (auto& d : scaled.dnns)
      for (auto& g : d.groups) {
        for (auto& [a, ms] : g.exec_ms) ms *= 2.0;
        for (auto& [p, ms] : g.tau_out_ms) ms *= 2.0;
        for (auto& [p, ms] : g.tau_in_ms) ms *= 2.0;
      }
    scaled.epsilon_ms *= 2.0;
    OptimizeResult a, b;
    bool infeasible = false;
    try {
      a = optimize(s);
      b = optimize(scaled);
    } catch (const NoFeasibleScheduleError&) {
      infeasible = true;
    }
    if (infeasible) continue;
    CHECK(a.schedule == b.schedule);
    if (s.objective == Objective::MinMaxLatency)
      CHECK(b.objective == 2.0 * a.objective);
    else
      CHECK(b.objective == 0.5 * a.objective);
    for (std::size_t n = 0; n < a.timeline.dnn_latency_ms.size(); ++n)
      CHECK(b.timeline.dnn_latency_ms[n] == 2.0 * a.timeline.dnn_latency_ms[n]);
  }
}

TEST_CASE("search bounds are admissible on small instances") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    FixtureParams p;
    p.seed = seed;
    p.max_total_groups = 6;
    p.max_groups = 3;
    Scenario s = make_random_scenario(p);
    struct Node {
      std::vector<int> partial;
      double bound;
    };
    std::vector<Node> nodes;
    std::function<void(const std::vector<int>&, double)> hook =
        [&nodes](const std::vector<int>& partial, double bound) {
          if (nodes.size() < 500) nodes.push_back({partial, bound});
        };
    OptimizeOptions opts;
    opts.node_hook = &hook;
    try {
      optimize(s, opts);
    } catch (const NoFeasibleScheduleError&) {
      continue;
    }
    detail::FlatIndex fi(s);
    for (const auto& node : nodes) {
      // True best completion below the node, by enumeration.
      std::vector<std::vector<int>> choices;
      for (int n = 0; n < s.dnn_count(); ++n)
        for (int i = 0; i < s.dnns[std::size_t(n)].total_groups(); ++i) {
          int flat_idx = fi(n, i);
          if (node.partial[std::size_t(flat_idx)] >= 0) {
            choices.push_back({node.partial[std::size_t(flat_idx)]});
          } else {
            std::vector<int> v;
            for (auto [a, ms] : s.dnns[std::size_t(n)].group_at(i).exec_ms)
              v.push_back(a);
            choices.push_back(std::move(v));
          }
        }
      double best_cost = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> pos(choices.size(), 0);
      while (true) {
        std::vector<int> flat(choices.size());
        for (std::size_t k = 0; k < choices.size(); ++k) flat[k] = choices[k][pos[k]];
        auto cand = detail::evaluate_candidate(s, flat);
        if (cand) best_cost = std::min(best_cost, cand->cost);
        std::size_t k = choices.size();
        bool done = true;
        while (k-- > 0) {
          if (++pos[k] < choices[k].size()) {
            done = false;
            break;
          }
          pos[k] = 0;
        }
        if (done) break;
      }
      if (std::isinf(best_cost)) continue;  // no feasible completion
      CHECK(node.bound <= best_cost + 1e-9 * (1.0 + std::abs(best_cost)));
    }
  }
}

TEST_CASE("dynamic replay: deterministic steady states, traces match anytime") {
  Scenario a = fixtures::crossed_scenario();
  Scenario b = fixtures::transition_hostile_scenario();
  std::vector<DynamicPhase> phases = {{a, 10000.0}, {b, 10000.0}, {a, 10000.0}};
  auto reports = run_dynamic(phases);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].steady_state_objective == reports[2].steady_state_objective);
  CHECK(reports[0].proven_optimal);
  CHECK(reports[1].proven_optimal);
  CHECK(reports[0].time_to_optimal_ms.has_value());
  OptimizeResult direct = optimize(a);
  CHECK(reports[0].steady_state_objective == direct.objective);
  CHECK(reports[0].incumbents.back().schedule == direct.schedule);
  CHECK_THROWS_AS(run_dynamic({}), DomainError);
}

TEST_CASE("a one-phase replay reproduces the anytime trace") {
  Scenario s = fixtures::crossed_scenario();
  auto reports = run_dynamic({{s, 10000.0}});
  std::vector<IncumbentRecord> trace;
  IncumbentSink sink = [&trace](const IncumbentRecord& inc) { trace.push_back(inc); };
  optimize_anytime(s, {}, sink);
  REQUIRE(reports.size() == 1);
  REQUIRE(reports[0].incumbents.size() == trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    CHECK(reports[0].incumbents[k].schedule == trace[k].schedule);
    CHECK(reports[0].incumbents[k].objective == trace[k].objective);
  }
}
