#pragma once

#include <algorithm>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "cosched/errors.hpp"
#include "cosched/model.hpp"

namespace cosched {

/// One schedulable span of consecutive layers: [start_index, end_index).
struct GroupBoundary {
  int start_index = 0;
  int end_index = 0;  // exclusive
  std::set<int> supported_accelerators;

  bool operator==(const GroupBoundary&) const = default;
};

/// Collapses a raw layer list into minimal schedulable groups. A group ends
/// after layer j exactly when j permits a transition (not fusible into the
/// next layer, no reformat on exit, transition allowed) or j is the last
/// layer. Each group supports the intersection of its members' support sets;
/// an empty intersection means the per-layer constraints contradict each
/// other and raises EmptySupportError.
inline std::vector<GroupBoundary> group_layers(const std::vector<RawLayer>& layers) {
  if (layers.empty()) throw DomainError("group_layers: layer list is empty");
  std::vector<GroupBoundary> out;
  int start = 0;
  std::set<int> support = layers.front().supported_accelerators;
  for (int j = 0; j < int(layers.size()); ++j) {
    const RawLayer& l = layers[std::size_t(j)];
    if (j > start) {
      std::set<int> merged;
      std::set_intersection(support.begin(), support.end(),
                            l.supported_accelerators.begin(),
                            l.supported_accelerators.end(),
                            std::inserter(merged, merged.begin()));
      support = std::move(merged);
    }
    const bool last = j + 1 == int(layers.size());
    const bool boundary = last || (!l.fusible_with_next && !l.reformat_on_exit &&
                                   l.transition_allowed_after);
    if (boundary) {
      if (support.empty())
        throw EmptySupportError("layers [" + std::to_string(start) + "," +
                                std::to_string(j + 1) +
                                ") have no common accelerator");
      out.push_back({start, j + 1, support});
      start = j + 1;
      if (!last) support = layers[std::size_t(start)].supported_accelerators;
    }
  }
  return out;
}

}  // namespace cosched
