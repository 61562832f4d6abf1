#include <doctest.h>

#include <string>

#include "cosched/fixture_gen.hpp"
#include "cosched/model.hpp"
#include "cosched/scenario_json.hpp"
#include "test_fixtures.hpp"

using namespace cosched;

namespace {

const char* kMinimalScenario = R"({
  "accelerators": [{"id": 0, "name": "GPU"}],
  "dnns": [{"name": "tiny", "groups": [
    {"exec_ms": {"0": 1.5}, "thr_gbps": {"0": 4.0}, "tau_out_ms": {}, "tau_in_ms": {}}
  ]}],
  "contention": {"0": {"req_gbps": [0], "ext_gbps": [0], "factor": [[1.0]]}},
  "objective": "minmax_latency"
})";

}  // namespace

TEST_CASE("smallest valid scenario parses") {
  Scenario s = parse_scenario(kMinimalScenario);
  CHECK(s.dnn_count() == 1);
  CHECK(s.dnns[0].total_groups() == 1);
  CHECK(s.epsilon_ms == 0.05);  // default when absent
  CHECK(s.dnns[0].iterations == 1);
}

TEST_CASE("the GoogleNet profile round-trips through the file format") {
  Scenario s = fixtures::googlenet_scenario();
  Scenario parsed = parse_scenario(emit_scenario(s));
  CHECK(parsed == s);
  CHECK(parsed.dnns[0].base_group_count() == 10);
  CHECK(parsed.dnns[0].groups[0].exec_ms.at(0) == 0.45);
  CHECK(parsed.dnns[0].groups[9].tau_out_ms.at({0, 1}) == 0.007);
}

TEST_CASE("a group may omit an accelerator it does not support") {
  std::string text = R"({
    "accelerators": [{"id": 0, "name": "GPU"}, {"id": 1, "name": "DLA"}],
    "dnns": [{"name": "gpu-only", "groups": [
      {"exec_ms": {"0": 2.0}, "thr_gbps": {"0": 8.0},
       "tau_out_ms": {"0-1": 0.1, "1-0": 0.1}, "tau_in_ms": {"0-1": 0.1, "1-0": 0.1}}
    ]}],
    "contention": {
      "0": {"req_gbps": [0], "ext_gbps": [0], "factor": [[1.0]]},
      "1": {"req_gbps": [0], "ext_gbps": [0], "factor": [[1.0]]}},
    "objective": "max_throughput"
  })";
  Scenario s = parse_scenario(text);
  CHECK(s.dnns[0].groups[0].supports(0));
  CHECK(!s.dnns[0].groups[0].supports(1));
}

TEST_CASE("syntax errors carry position info") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), ParseError);
  try {
    parse_scenario("{\n  \"accelerators\": [,]\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("semantic errors name the violated invariant") {
  // Missing thr_gbps coverage.
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({
        "accelerators": [{"id": 0, "name": "GPU"}],
        "dnns": [{"name": "x", "groups": [
          {"exec_ms": {"0": 1.0}, "thr_gbps": {}, "tau_out_ms": {}, "tau_in_ms": {}}]}],
        "contention": {"0": {"req_gbps": [0], "ext_gbps": [0], "factor": [[1.0]]}},
        "objective": "minmax_latency"
      })"),
      doctest::Contains("missing thr_gbps"), ValidationError);

  // Non-dense accelerator ids.
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({
        "accelerators": [{"id": 1, "name": "GPU"}],
        "dnns": [{"name": "x", "groups": [
          {"exec_ms": {"1": 1.0}, "thr_gbps": {"1": 1.0}, "tau_out_ms": {}, "tau_in_ms": {}}]}],
        "contention": {"1": {"req_gbps": [0], "ext_gbps": [0], "factor": [[1.0]]}},
        "objective": "minmax_latency"
      })"),
      doctest::Contains("dense"), ValidationError);

  // Dependency cycle.
  Scenario s = fixtures::two_layer_contention_scenario();
  s.dependencies = {{0, 1}, {1, 0}};
  CHECK_THROWS_WITH_AS(parse_scenario(emit_scenario(s)), doctest::Contains("cycle"),
                       ValidationError);

  // Missing tau coverage for a 2-accelerator scenario.
  Scenario t = fixtures::two_layer_contention_scenario();
  t.dnns[0].groups[0].tau_out_ms.erase({0, 1});
  CHECK_THROWS_WITH_AS(parse_scenario(emit_scenario(t)),
                       doctest::Contains("missing tau_out_ms"), ValidationError);

  // Contention grid without the zero-external column.
  Scenario u = fixtures::two_layer_contention_scenario();
  u.contention.grids[0].ext_gbps = {1.0, 2.0};
  CHECK_THROWS_AS(parse_scenario(emit_scenario(u)), ValidationError);

  // Unknown objective string.
  CHECK_THROWS_WITH_AS(
      parse_scenario(R"({
        "accelerators": [{"id": 0, "name": "GPU"}],
        "dnns": [{"name": "x", "groups": [
          {"exec_ms": {"0": 1.0}, "thr_gbps": {"0": 1.0}, "tau_out_ms": {}, "tau_in_ms": {}}]}],
        "contention": {"0": {"req_gbps": [0], "ext_gbps": [0], "factor": [[1.0]]}},
        "objective": "latency"
      })"),
      doctest::Contains("objective"), ValidationError);

  // Execution time must be positive.
  Scenario v = fixtures::two_layer_contention_scenario();
  v.dnns[0].groups[0].exec_ms[0] = 0.0;
  CHECK_THROWS_WITH_AS(parse_scenario(emit_scenario(v)), doctest::Contains("> 0"),
                       ValidationError);
}

TEST_CASE("scenario round-trip holds over the random population") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    Scenario s = make_random_scenario({seed});
    Scenario parsed = parse_scenario(emit_scenario(s));
    CHECK(parsed == s);
  }
}

TEST_CASE("validate_schedule reports unassigned and unsupported groups") {
  Scenario s = fixtures::googlenet_scenario();
  Schedule good = fixtures::all_on(s, 0);
  CHECK(validate_schedule(s, good).empty());

  Schedule missing = good;
  missing.assignment.erase({0, 4});
  auto v1 = validate_schedule(s, missing);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == "unassigned (0,4)");

  Schedule bad = good;
  bad.assignment[{0, 2}] = 7;
  auto v2 = validate_schedule(s, bad);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].find("(0,2)") != std::string::npos);
  CHECK(v2[0].find("7") != std::string::npos);
}

TEST_CASE("iterations expand into schedulable copies") {
  Scenario s = fixtures::two_layer_contention_scenario();
  s.dnns[0].iterations = 3;
  validate_scenario(s);
  CHECK(s.dnns[0].total_groups() == 3);
  CHECK(&s.dnns[0].group_at(2) == &s.dnns[0].groups[0]);
  Scenario parsed = parse_scenario(emit_scenario(s));
  CHECK(parsed.dnns[0].iterations == 3);

  // A schedule must cover every copy.
  Schedule sched = fixtures::all_on(s, 0);
  CHECK(validate_schedule(s, sched).empty());
  sched.assignment.erase({0, 2});
  CHECK(validate_schedule(s, sched).size() == 1);
}

TEST_CASE("schedule documents parse and emit") {
  Schedule sched;
  sched.assignment[{0, 0}] = 1;
  sched.assignment[{0, 1}] = 0;
  sched.assignment[{1, 0}] = 1;
  std::string text = schedule_to_json(sched).dump();
  CHECK(parse_schedule(text) == sched);
  CHECK_THROWS_AS(parse_schedule("{\"nodot\": 0}"), ValidationError);
}
