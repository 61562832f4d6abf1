#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cosched/contention.hpp"
#include "cosched/errors.hpp"

namespace cosched {

/// One processing unit of the SoC. `blackbox` marks units whose requested
/// throughput cannot be profiled directly and is estimated instead.
struct Accelerator {
  int id = 0;
  std::string name;
  bool blackbox = false;

  bool operator==(const Accelerator&) const = default;
};

/// A single DNN layer as it arrives from the front end, before grouping.
/// The flags are precomputed by whoever exports the network; this library
/// does not analyze layer semantics.
struct RawLayer {
  int index = 0;
  std::string kind;
  bool fusible_with_next = false;
  bool reformat_on_exit = false;
  bool transition_allowed_after = true;
  std::set<int> supported_accelerators;

  bool operator==(const RawLayer&) const = default;
};

using AccelPair = std::pair<int, int>;  // (from accelerator, to accelerator)

/// Atomic schedulable unit: one or more fused layers. Execution time and
/// requested memory throughput are per accelerator; transition costs are per
/// ordered accelerator pair and are charged when the next (tau_out) or
/// previous (tau_in) group runs elsewhere.
struct LayerGroup {
  int dnn = 0;
  int index = 0;
  std::map<int, double> exec_ms;                // accelerator id -> standalone ms
  std::map<int, double> thr_gbps;               // accelerator id -> requested GB/s
  std::map<AccelPair, double> tau_out_ms;       // exit cost of a transition after this group
  std::map<AccelPair, double> tau_in_ms;        // entry cost of a transition before this group

  bool operator==(const LayerGroup&) const = default;

  bool supports(int accel) const { return exec_ms.count(accel) != 0; }
};

/// One network instance to schedule. `iterations` > 1 means the group list
/// is logically concatenated that many times (back-to-back inferences);
/// copies are independent schedulable work and may land on different
/// accelerators.
struct DnnSpec {
  std::string name;
  int iterations = 1;
  std::vector<LayerGroup> groups;

  bool operator==(const DnnSpec&) const = default;

  int base_group_count() const { return int(groups.size()); }
  int total_groups() const { return iterations * int(groups.size()); }

  /// Group backing an expanded index (iteration copies share base groups).
  const LayerGroup& group_at(int expanded_index) const {
    return groups[std::size_t(expanded_index) % groups.size()];
  }
};

enum class Objective { MaxThroughput, MinMaxLatency };

inline const char* to_string(Objective o) {
  return o == Objective::MaxThroughput ? "max_throughput" : "minmax_latency";
}

/// A complete scheduling problem instance.
struct Scenario {
  std::vector<Accelerator> accelerators;
  std::vector<DnnSpec> dnns;
  // (producer dnn, consumer dnn): the consumer's first group starts no
  // earlier than the producer's completion.
  std::vector<std::pair<int, int>> dependencies;
  ContentionModel contention;
  double epsilon_ms = 0.05;
  Objective objective = Objective::MinMaxLatency;

  bool operator==(const Scenario&) const = default;

  int accel_count() const { return int(accelerators.size()); }
  int dnn_count() const { return int(dnns.size()); }
  int total_groups() const {
    int n = 0;
    for (const auto& d : dnns) n += d.total_groups();
    return n;
  }
};

/// Total assignment of expanded (dnn, group) pairs to accelerator ids.
struct Schedule {
  std::map<std::pair<int, int>, int> assignment;

  bool operator==(const Schedule&) const = default;

  int at(int dnn, int group) const { return assignment.at({dnn, group}); }
};

namespace detail {

inline bool dependency_dag_ok(int dnn_count,
                              const std::vector<std::pair<int, int>>& edges) {
  // Kahn's algorithm over dnn indices.
  std::vector<int> indeg(std::size_t(dnn_count), 0);
  for (auto [p, c] : edges) indeg[std::size_t(c)]++;
  std::vector<int> queue;
  for (int i = 0; i < dnn_count; ++i)
    if (indeg[std::size_t(i)] == 0) queue.push_back(i);
  int seen = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    ++seen;
    for (auto [p, c] : edges)
      if (p == v && --indeg[std::size_t(c)] == 0) queue.push_back(c);
  }
  return seen == dnn_count;
}

}  // namespace detail

/// Checks every structural invariant of a Scenario. Throws ValidationError
/// naming the first violation. parse_scenario calls this; programmatically
/// built scenarios can call it directly.
inline void validate_scenario(const Scenario& s) {
  if (s.accelerators.empty()) throw ValidationError("scenario has no accelerators");
  std::set<std::string> names;
  for (int i = 0; i < s.accel_count(); ++i) {
    const auto& a = s.accelerators[std::size_t(i)];
    if (a.id != i)
      throw ValidationError("accelerator ids must be dense 0..N-1; position " +
                            std::to_string(i) + " has id " + std::to_string(a.id));
    if (!names.insert(a.name).second)
      throw ValidationError("duplicate accelerator name \"" + a.name + "\"");
  }
  if (s.dnns.empty()) throw ValidationError("scenario has no dnns");
  for (int n = 0; n < s.dnn_count(); ++n) {
    const auto& d = s.dnns[std::size_t(n)];
    if (d.groups.empty())
      throw ValidationError("dnn " + std::to_string(n) + " has no groups");
    if (d.iterations < 1)
      throw ValidationError("dnn " + std::to_string(n) + " iterations must be >= 1");
    for (int i = 0; i < d.base_group_count(); ++i) {
      const auto& g = d.groups[std::size_t(i)];
      const std::string where = "group (" + std::to_string(n) + "," + std::to_string(i) + ")";
      if (g.dnn != n || g.index != i)
        throw ValidationError(where + " carries mismatched (dnn,index) fields");
      if (g.exec_ms.empty()) throw ValidationError(where + " has empty support set");
      for (auto [a, ms] : g.exec_ms) {
        if (a < 0 || a >= s.accel_count())
          throw ValidationError(where + " exec_ms names unknown accelerator " +
                                std::to_string(a));
        if (!(ms > 0.0))
          throw ValidationError(where + " exec_ms for accelerator " +
                                std::to_string(a) + " must be > 0");
      }
      for (auto [a, gbps] : g.thr_gbps) {
        if (a < 0 || a >= s.accel_count())
          throw ValidationError(where + " thr_gbps names unknown accelerator " +
                                std::to_string(a));
        if (!(gbps >= 0.0))
          throw ValidationError(where + " thr_gbps for accelerator " +
                                std::to_string(a) + " must be >= 0");
      }
      for (auto [a, ms] : g.exec_ms)
        if (!g.thr_gbps.count(a))
          throw ValidationError(where + " missing thr_gbps for accelerator " +
                                std::to_string(a));
      for (int from = 0; from < s.accel_count(); ++from)
        for (int to = 0; to < s.accel_count(); ++to) {
          if (from == to) continue;
          if (!g.tau_out_ms.count({from, to}))
            throw ValidationError(where + " missing tau_out_ms for pair " +
                                  std::to_string(from) + "-" + std::to_string(to));
          if (!g.tau_in_ms.count({from, to}))
            throw ValidationError(where + " missing tau_in_ms for pair " +
                                  std::to_string(from) + "-" + std::to_string(to));
        }
      for (auto [pair, ms] : g.tau_out_ms)
        if (!(ms >= 0.0))
          throw ValidationError(where + " negative tau_out_ms");
      for (auto [pair, ms] : g.tau_in_ms)
        if (!(ms >= 0.0))
          throw ValidationError(where + " negative tau_in_ms");
    }
  }
  for (auto [p, c] : s.dependencies) {
    if (p < 0 || p >= s.dnn_count() || c < 0 || c >= s.dnn_count())
      throw ValidationError("dependency edge names unknown dnn");
    if (p == c) throw ValidationError("dependency edge from a dnn to itself");
  }
  if (!detail::dependency_dag_ok(s.dnn_count(), s.dependencies))
    throw ValidationError("dependency edges contain a cycle");
  for (int a = 0; a < s.accel_count(); ++a) {
    auto it = s.contention.grids.find(a);
    if (it == s.contention.grids.end())
      throw ValidationError("missing contention grid for accelerator " + std::to_string(a));
    it->second.validate("contention grid for accelerator " + std::to_string(a));
  }
  for (auto& [a, grid] : s.contention.grids)
    if (a < 0 || a >= s.accel_count())
      throw ValidationError("contention grid names unknown accelerator " + std::to_string(a));
  if (!(s.epsilon_ms >= 0.0)) throw ValidationError("epsilon_ms must be >= 0");
}

/// Structural check of a schedule against a scenario: totality and support
/// sets only. Timing feasibility is the timeline evaluator's job.
/// Violations are returned as data, not thrown.
inline std::vector<std::string> validate_schedule(const Scenario& scenario,
                                                  const Schedule& schedule) {
  std::vector<std::string> violations;
  for (int n = 0; n < scenario.dnn_count(); ++n) {
    const auto& d = scenario.dnns[std::size_t(n)];
    for (int i = 0; i < d.total_groups(); ++i) {
      auto it = schedule.assignment.find({n, i});
      const std::string tag = "(" + std::to_string(n) + "," + std::to_string(i) + ")";
      if (it == schedule.assignment.end()) {
        violations.push_back("unassigned " + tag);
        continue;
      }
      int a = it->second;
      if (a < 0 || a >= scenario.accel_count())
        violations.push_back("group " + tag + " assigned to unknown accelerator " +
                             std::to_string(a));
      else if (!d.group_at(i).supports(a))
        violations.push_back("group " + tag + " assigned to unsupported accelerator " +
                             std::to_string(a));
    }
  }
  return violations;
}

/// Cumulative external memory demand seen by `self` while the given groups
/// run concurrently (contention module, demand aggregation step). Entries
/// are (group, assigned accelerator); `self` is identified by its
/// (dnn, index) pair and must appear in the list. Summation is done in
/// ascending value order, so the result is permutation-invariant bit for bit.
struct RunningGroup {
  const LayerGroup* group = nullptr;
  int accel = 0;
};

inline double external_demand(const std::vector<RunningGroup>& running,
                              int self_dnn, int self_index) {
  std::vector<double> peers;
  peers.reserve(running.size());
  bool self_seen = false;
  for (const auto& r : running) {
    if (!self_seen && r.group->dnn == self_dnn && r.group->index == self_index) {
      self_seen = true;
      continue;
    }
    peers.push_back(r.group->thr_gbps.at(r.accel));
  }
  if (!self_seen)
    throw SelfNotRunningError("external_demand: group (" + std::to_string(self_dnn) +
                              "," + std::to_string(self_index) + ") is not running");
  return detail::sorted_sum(std::move(peers));
}

}  // namespace cosched
