#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cosched/errors.hpp"

namespace cosched {

/// Piecewise slowdown surface for one accelerator: bilinear interpolation over
/// a (requested throughput, external throughput) grid of factors >= 1.
///
/// The grid must include ext_gbps[0] == 0 with a unit factor column, so a
/// layer running alone comes out at exactly 1.0 instead of being
/// special-cased by callers.
struct ContentionGrid {
  std::vector<double> req_gbps;               // strictly ascending, >= 1 point
  std::vector<double> ext_gbps;               // strictly ascending, ext_gbps[0] == 0
  std::vector<std::vector<double>> factor;    // [req index][ext index], each >= 1

  bool operator==(const ContentionGrid&) const = default;

  void validate(const std::string& where) const {
    if (req_gbps.empty() || ext_gbps.empty())
      throw ValidationError(where + ": contention axes need at least one point");
    for (std::size_t i = 1; i < req_gbps.size(); ++i)
      if (!(req_gbps[i - 1] < req_gbps[i]))
        throw ValidationError(where + ": req_gbps not strictly ascending");
    for (std::size_t i = 1; i < ext_gbps.size(); ++i)
      if (!(ext_gbps[i - 1] < ext_gbps[i]))
        throw ValidationError(where + ": ext_gbps not strictly ascending");
    if (ext_gbps.front() != 0.0)
      throw ValidationError(where + ": ext_gbps[0] must be 0");
    if (factor.size() != req_gbps.size())
      throw ValidationError(where + ": factor row count != req_gbps size");
    for (std::size_t r = 0; r < factor.size(); ++r) {
      const auto& row = factor[r];
      if (row.size() != ext_gbps.size())
        throw ValidationError(where + ": factor column count != ext_gbps size");
      if (row.front() != 1.0)
        throw ValidationError(where + ": factor[*][0] must be 1.0 (no external traffic)");
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!(row[c] >= 1.0))
          throw ValidationError(where + ": slowdown factor below 1.0");
        if (c > 0 && row[c] < row[c - 1])
          throw ValidationError(where + ": factor decreasing along ext axis");
      }
    }
  }
};

/// Per-accelerator slowdown surfaces (the cont_model consumed by the
/// timeline evaluator). Immutable after construction, freely shareable.
struct ContentionModel {
  std::map<int, ContentionGrid> grids;  // accelerator id -> surface

  bool operator==(const ContentionModel&) const = default;

  /// Identity model: one degenerate grid per accelerator, factor 1 everywhere.
  static ContentionModel identity(const std::vector<int>& accel_ids) {
    ContentionModel m;
    for (int id : accel_ids)
      m.grids[id] = ContentionGrid{{0.0}, {0.0}, {{1.0}}};
    return m;
  }
};

namespace detail {

// Index of the axis cell containing x, with endpoint clamping.
// Returns (i, u) such that x ~ axis[i] + u * (axis[i+1] - axis[i]), u in [0,1].
inline std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
  if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
  if (x >= axis.back()) return {axis.size() - 2, 1.0};
  std::size_t hi = std::size_t(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
  std::size_t lo = hi - 1;
  double u = (x - axis[lo]) / (axis[hi] - axis[lo]);
  return {lo, u};
}

// Sum doubles in ascending value order so the result is permutation-invariant.
inline double sorted_sum(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

}  // namespace detail

/// Transfers a GPU-measured requested throughput onto a black-box DSA using
/// the ratio of external-memory-controller utilizations of the two units.
inline double estimate_dsa_throughput(double thr_gpu, double emc_util_gpu,
                                      double emc_util_dsa) {
  if (!(thr_gpu > 0.0) || !(emc_util_gpu > 0.0) || !(emc_util_dsa > 0.0))
    throw DomainError("estimate_dsa_throughput: inputs must be positive");
  return thr_gpu * emc_util_dsa / emc_util_gpu;
}

/// Slowdown factor for a layer on `accel` that requests `requested` GB/s
/// while other accelerators demand `external` GB/s in total. Bilinear over
/// the accelerator's grid; queries outside the grid clamp to the edge.
inline double slowdown(const ContentionModel& model, int accel, double requested,
                       double external) {
  auto it = model.grids.find(accel);
  if (it == model.grids.end())
    throw UnknownAcceleratorError("slowdown: no contention grid for accelerator " +
                                  std::to_string(accel));
  const ContentionGrid& g = it->second;
  auto [ri, ru] = detail::locate(g.req_gbps, requested);
  auto [ei, eu] = detail::locate(g.ext_gbps, external);
  std::size_t ri1 = (g.req_gbps.size() == 1) ? ri : ri + 1;
  std::size_t ei1 = (g.ext_gbps.size() == 1) ? ei : ei + 1;
  double f00 = g.factor[ri][ei];
  double f01 = g.factor[ri][ei1];
  double f10 = g.factor[ri1][ei];
  double f11 = g.factor[ri1][ei1];
  double low = f00 + (f01 - f00) * eu;
  double high = f10 + (f11 - f10) * eu;
  return low + (high - low) * ru;
}

}  // namespace cosched
