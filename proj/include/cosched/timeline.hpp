#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cosched/contention.hpp"
#include "cosched/errors.hpp"
#include "cosched/model.hpp"

namespace cosched {

struct Interval {
  double start_ms = 0.0;
  double end_ms = 0.0;
};

/// Length of the intersection of two closed intervals, in ms.
inline double interval_overlap(Interval a, Interval b) {
  return std::max(0.0, std::min(a.end_ms, b.end_ms) - std::max(a.start_ms, b.start_ms));
}

/// A maximal span of a group's execution during which its slowdown factor
/// was constant (the set of concurrently running groups did not change).
struct SlowdownSegment {
  double start_ms = 0.0;
  double end_ms = 0.0;
  double factor = 1.0;

  bool operator==(const SlowdownSegment&) const = default;
};

struct GroupTiming {
  int dnn = 0;
  int group = 0;  // expanded index
  int accel = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  std::vector<SlowdownSegment> segments;

  bool operator==(const GroupTiming&) const = default;
};

/// Same-accelerator overlap between groups of distinct DNNs that exceeds the
/// scenario's epsilon tolerance.
struct OverlapViolation {
  int dnn_a = 0, group_a = 0;
  int dnn_b = 0, group_b = 0;
  int accel = 0;
  double overlap_ms = 0.0;

  bool operator==(const OverlapViolation&) const = default;
};

/// Fully evaluated schedule: start/end times, slowdown segments, per-DNN
/// latencies, the event grid, and the overlap-constraint verdict.
struct Timeline {
  std::vector<GroupTiming> groups;        // ordered by (dnn, group)
  std::vector<double> dnn_release_ms;     // when each DNN's first group may start
  std::vector<double> dnn_completion_ms;  // absolute end of each DNN's last group
  std::vector<double> dnn_latency_ms;     // T_n = completion - release
  std::vector<double> events_ms;          // every start/end timestamp, ascending, unique
  double makespan_ms = 0.0;
  bool feasible = true;
  std::vector<OverlapViolation> violations;

  bool operator==(const Timeline&) const = default;

  const GroupTiming& timing(int dnn, int group) const {
    for (const auto& g : groups)
      if (g.dnn == dnn && g.group == group) return g;
    throw DomainError("timeline has no group (" + std::to_string(dnn) + "," +
                      std::to_string(group) + ")");
  }
};

namespace detail {

struct SimGroup {
  int dnn = 0;
  int idx = 0;  // expanded index
  int accel = 0;
  double work_ms = 0.0;       // standalone execution time on `accel`
  double req_gbps = 0.0;
  double remaining = 0.0;
  double factor = 1.0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  std::vector<SlowdownSegment> segments;
};

struct PendingStart {
  double time_ms = 0.0;
  int dnn = 0;
  int idx = 0;
};

}  // namespace detail

/// Evaluates a schedule against a scenario.
///
/// Each group carries `work = t(group, accel)` and progresses at rate 1/c,
/// where c is the slowdown of its requested throughput against the summed
/// demand of every other group running in the same contention interval.
/// Intervals are delimited exactly by group starts and ends; at each event
/// the rates of all running groups are recomputed and finish times
/// re-projected.
/// A transition between adjacent groups on different accelerators inserts
/// tau_out + tau_in serially; transition spans occupy no accelerator and
/// generate no memory demand. A dependency edge delays the consumer's first
/// group to the completion of the producer.
///
/// Same-accelerator overlap between groups of distinct DNNs longer than
/// epsilon renders the timeline infeasible; this is a verdict, not an error.
/// Requires validate_schedule(scenario, schedule) to be empty.
inline Timeline evaluate(const Scenario& scenario, const Schedule& schedule) {
  {
    auto bad = validate_schedule(scenario, schedule);
    if (!bad.empty())
      throw DomainError("evaluate: invalid schedule: " + bad.front());
  }

  const int dnn_count = scenario.dnn_count();
  std::vector<std::vector<detail::SimGroup>> sims(static_cast<std::size_t>(dnn_count));
  for (int n = 0; n < dnn_count; ++n) {
    const DnnSpec& d = scenario.dnns[std::size_t(n)];
    sims[std::size_t(n)].resize(std::size_t(d.total_groups()));
    for (int i = 0; i < d.total_groups(); ++i) {
      const LayerGroup& base = d.group_at(i);
      detail::SimGroup& g = sims[std::size_t(n)][std::size_t(i)];
      g.dnn = n;
      g.idx = i;
      g.accel = schedule.at(n, i);
      g.work_ms = base.exec_ms.at(g.accel);
      g.req_gbps = base.thr_gbps.at(g.accel);
    }
  }

  // Dependency bookkeeping: a DNN is released when all producers finished.
  std::vector<int> pending_producers(std::size_t(dnn_count), 0);
  for (auto [p, c] : scenario.dependencies) pending_producers[std::size_t(c)]++;
  std::vector<double> release(std::size_t(dnn_count), 0.0);
  std::vector<double> completion(std::size_t(dnn_count), 0.0);

  std::vector<detail::PendingStart> pending;
  std::vector<detail::SimGroup*> running;
  for (int n = 0; n < dnn_count; ++n)
    if (pending_producers[std::size_t(n)] == 0) pending.push_back({0.0, n, 0});

  auto recompute_factors = [&]() {
    for (detail::SimGroup* g : running) {
      std::vector<double> peers;
      peers.reserve(running.size());
      for (detail::SimGroup* o : running)
        if (o != g) peers.push_back(o->req_gbps);
      double ext = detail::sorted_sum(std::move(peers));
      g->factor = slowdown(scenario.contention, g->accel, g->req_gbps, ext);
    }
  };

  auto schedule_successor = [&](const detail::SimGroup& done, double now) {
    const DnnSpec& d = scenario.dnns[std::size_t(done.dnn)];
    if (done.idx + 1 < d.total_groups()) {
      int next_accel = sims[std::size_t(done.dnn)][std::size_t(done.idx + 1)].accel;
      double at = now;
      if (next_accel != done.accel) {
        AccelPair pair{done.accel, next_accel};
        at += d.group_at(done.idx).tau_out_ms.at(pair) +
              d.group_at(done.idx + 1).tau_in_ms.at(pair);
      }
      pending.push_back({at, done.dnn, done.idx + 1});
    } else {
      completion[std::size_t(done.dnn)] = now;
      for (auto [p, c] : scenario.dependencies) {
        if (p != done.dnn) continue;
        if (--pending_producers[std::size_t(c)] == 0) {
          release[std::size_t(c)] = now;
          pending.push_back({now, c, 0});
        }
      }
    }
  };

  double now = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  while (!running.empty() || !pending.empty()) {
    double next_end = inf;
    for (detail::SimGroup* g : running)
      next_end = std::min(next_end, now + g->remaining * g->factor);
    double next_start = inf;
    for (const auto& p : pending) next_start = std::min(next_start, p.time_ms);
    const double t = std::min(next_end, next_start);

    if (t > now) {
      for (detail::SimGroup* g : running) {
        if (!g->segments.empty() && g->segments.back().factor == g->factor &&
            g->segments.back().end_ms == now)
          g->segments.back().end_ms = t;
        else
          g->segments.push_back({now, t, g->factor});
        double projected = now + g->remaining * g->factor;
        if (projected == t)
          g->remaining = 0.0;
        else
          g->remaining = std::max(0.0, g->remaining - (t - now) / g->factor);
      }
      now = t;
    }

    // Ends strictly before starts; ties among equal timestamps break by
    // (dnn, group) index so the evaluation is deterministic.
    std::vector<detail::SimGroup*> ending;
    for (detail::SimGroup* g : running)
      if (g->remaining == 0.0) ending.push_back(g);
    std::sort(ending.begin(), ending.end(), [](auto* a, auto* b) {
      return std::pair{a->dnn, a->idx} < std::pair{b->dnn, b->idx};
    });
    for (detail::SimGroup* g : ending) {
      g->end_ms = now;
      running.erase(std::find(running.begin(), running.end(), g));
      schedule_successor(*g, now);
    }

    std::vector<detail::PendingStart> due;
    for (auto it = pending.begin(); it != pending.end();) {
      if (it->time_ms == now) {
        due.push_back(*it);
        it = pending.erase(it);
      } else {
        ++it;
      }
    }
    std::sort(due.begin(), due.end(), [](const auto& a, const auto& b) {
      return std::pair{a.dnn, a.idx} < std::pair{b.dnn, b.idx};
    });
    for (const auto& s : due) {
      detail::SimGroup& g = sims[std::size_t(s.dnn)][std::size_t(s.idx)];
      g.start_ms = now;
      g.remaining = g.work_ms;
      running.push_back(&g);
    }

    if (!ending.empty() || !due.empty()) recompute_factors();
  }

  Timeline tl;
  tl.dnn_release_ms = release;
  tl.dnn_completion_ms = completion;
  tl.dnn_latency_ms.resize(std::size_t(dnn_count));
  for (int n = 0; n < dnn_count; ++n) {
    tl.dnn_latency_ms[std::size_t(n)] =
        completion[std::size_t(n)] - release[std::size_t(n)];
    tl.makespan_ms = std::max(tl.makespan_ms, completion[std::size_t(n)]);
  }
  for (int n = 0; n < dnn_count; ++n)
    for (auto& g : sims[std::size_t(n)]) {
      tl.groups.push_back(GroupTiming{g.dnn, g.idx, g.accel, g.start_ms, g.end_ms,
                                      std::move(g.segments)});
      tl.events_ms.push_back(g.start_ms);
      tl.events_ms.push_back(g.end_ms);
    }
  std::sort(tl.events_ms.begin(), tl.events_ms.end());
  tl.events_ms.erase(std::unique(tl.events_ms.begin(), tl.events_ms.end()),
                     tl.events_ms.end());

  // Overlap constraint: pairwise, distinct DNNs, same accelerator, with a
  // small absolute slack under epsilon for floating-point noise.
  const double slack = 1e-9;
  for (std::size_t i = 0; i < tl.groups.size(); ++i)
    for (std::size_t j = i + 1; j < tl.groups.size(); ++j) {
      const GroupTiming& a = tl.groups[i];
      const GroupTiming& b = tl.groups[j];
      if (a.dnn == b.dnn || a.accel != b.accel) continue;
      double ov = interval_overlap({a.start_ms, a.end_ms}, {b.start_ms, b.end_ms});
      if (ov > scenario.epsilon_ms + slack)
        tl.violations.push_back({a.dnn, a.group, b.dnn, b.group, a.accel, ov});
    }
  tl.feasible = tl.violations.empty();
  return tl;
}

/// Scalar score of a feasible timeline: total throughput (sum of 1/T_n,
/// larger is better) or the maximum per-DNN latency (smaller is better).
inline double objective_value(const Timeline& tl, Objective objective) {
  if (!tl.feasible)
    throw InfeasibleTimelineError("objective_value: timeline is infeasible");
  if (objective == Objective::MaxThroughput) {
    double sum = 0.0;
    for (double t : tl.dnn_latency_ms) sum += 1.0 / t;
    return sum;
  }
  double worst = 0.0;
  for (double t : tl.dnn_latency_ms) worst = std::max(worst, t);
  return worst;
}

}  // namespace cosched
