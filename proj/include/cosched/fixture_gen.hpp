#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cosched/model.hpp"

namespace cosched {

/// Knobs for the seeded scenario generator. Defaults produce the oracle-test
/// population: 2 accelerators, 2-3 DNNs, 2-6 groups each, at most 12 expanded
/// groups in total.
struct FixtureParams {
  std::uint64_t seed = 0;
  int accels = 2;
  int dnns = 0;  // 0 = random in [2, 3]
  int min_groups = 2;
  int max_groups = 6;
  int max_total_groups = 12;
  bool allow_iterations = true;
  bool allow_dependencies = true;
  bool identity_contention = false;
};

namespace detail {

// Distributions from <random> are implementation-defined; derive values from
// raw engine output so fixtures are identical across platforms.
struct FixtureRng {
  std::mt19937_64 engine;

  explicit FixtureRng(std::uint64_t seed) : engine(seed * 0x9e3779b97f4a7c15ull + 1) {}

  double unit() { return double(engine() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int uniform_int(int lo, int hi) {
    return lo + int(engine() % std::uint64_t(hi - lo + 1));
  }
  bool chance(double p) { return unit() < p; }
};

}  // namespace detail

/// Deterministic random scenario: same seed and parameters give the same
/// Scenario on every platform.
inline Scenario make_random_scenario(const FixtureParams& p) {
  detail::FixtureRng rng(p.seed);
  Scenario s;
  for (int a = 0; a < p.accels; ++a)
    s.accelerators.push_back({a, "ACC" + std::to_string(a), a > 0});

  const int dnn_count = p.dnns > 0 ? p.dnns : rng.uniform_int(2, 3);
  std::vector<int> group_counts;
  int total = 0;
  for (int n = 0; n < dnn_count; ++n) {
    int left = dnn_count - n - 1;
    int cap = p.max_total_groups - total - left * p.min_groups;
    int hi = std::min(p.max_groups, cap);
    int g = rng.uniform_int(p.min_groups, std::max(p.min_groups, hi));
    group_counts.push_back(g);
    total += g;
  }

  for (int n = 0; n < dnn_count; ++n) {
    DnnSpec d;
    d.name = "dnn" + std::to_string(n);
    d.iterations = 1;
    for (int i = 0; i < group_counts[std::size_t(n)]; ++i) {
      LayerGroup g;
      g.dnn = n;
      g.index = i;
      std::vector<int> support;
      for (int a = 0; a < p.accels; ++a) support.push_back(a);
      if (p.accels >= 2 && rng.chance(0.15))
        support.erase(support.begin() + rng.uniform_int(0, int(support.size()) - 1));
      for (int a : support) {
        g.exec_ms[a] = rng.uniform(0.5, 10.0);
        g.thr_gbps[a] = rng.uniform(5.0, 60.0);
      }
      for (int from = 0; from < p.accels; ++from)
        for (int to = 0; to < p.accels; ++to) {
          if (from == to) continue;
          g.tau_out_ms[{from, to}] = rng.uniform(0.01, 0.5);
          g.tau_in_ms[{from, to}] = rng.uniform(0.01, 0.5);
        }
      d.groups.push_back(std::move(g));
    }
    // Occasionally repeat a short DNN, as long as the expanded total stays
    // within the oracle budget.
    if (p.allow_iterations && rng.chance(0.15) &&
        total + group_counts[std::size_t(n)] <= p.max_total_groups) {
      d.iterations = 2;
      total += group_counts[std::size_t(n)];
    }
    s.dnns.push_back(std::move(d));
  }

  // Three concurrent DNNs on two accelerators almost always collide on a
  // shared unit, so three-DNN instances are usually pipelined; a small
  // share stays fully concurrent to keep the no-feasible-schedule path
  // exercised.
  if (p.allow_dependencies && dnn_count >= 2) {
    if (dnn_count >= 3) {
      if (rng.chance(0.85)) {
        s.dependencies.push_back({0, 1});
        if (rng.chance(0.4)) s.dependencies.push_back({1, 2});
      }
    } else if (rng.chance(0.25)) {
      s.dependencies.push_back({0, 1});
    }
  }

  for (int a = 0; a < p.accels; ++a) {
    if (p.identity_contention) {
      s.contention.grids[a] = ContentionGrid{{0.0}, {0.0}, {{1.0}}};
      continue;
    }
    ContentionGrid grid;
    double r1 = rng.uniform(10.0, 60.0);
    double r2 = r1 + rng.uniform(10.0, 60.0);
    double e1 = rng.uniform(10.0, 60.0);
    double e2 = e1 + rng.uniform(10.0, 60.0);
    grid.req_gbps = {0.0, r1, r2};
    grid.ext_gbps = {0.0, e1, e2};
    for (int r = 0; r < 3; ++r) {
      double f1 = 1.0 + rng.uniform(0.0, 1.2);
      double f2 = f1 + rng.uniform(0.0, 1.0);
      grid.factor.push_back({1.0, f1, f2});
    }
    s.contention.grids[a] = std::move(grid);
  }

  s.epsilon_ms = 0.05;
  s.objective = (p.seed % 2 == 0) ? Objective::MinMaxLatency : Objective::MaxThroughput;
  return s;
}

}  // namespace cosched
