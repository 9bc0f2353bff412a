// IQR outlier detection over per-neighbor DIO counts: a neighbor whose
// count in a tumbling window exceeds Q3 + k * IQR of the window's
// distribution is flagged. Strictly observe-only post-processing over a
// finished trace; it reads decoded-DIO records and touches nothing the
// simulation computes. Detection keys on the claimed source address
// (all a real node can see), so a spoofed replayer incriminates the
// identity it spoofs.

#ifndef RPLSIM_DETECT_HPP
#define RPLSIM_DETECT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "rplsim/core.hpp"
#include "rplsim/trace.hpp"

namespace rplsim {

struct DioWindow {
  std::int64_t window_us = 60 * kUsPerSecond;
  std::map<NodeId, std::int64_t> counts;  // claimed id -> DIOs decoded in window
};

struct FlagRecord {
  std::int64_t window_start_us = 0;
  NodeId observer = -1;
  NodeId flagged = -1;
  std::int64_t count = 0;
  double fence = 0.0;
};

namespace detect_detail {

// Quartile by linear interpolation on the sorted sample (the common
// (n-1)*q positional rule).
inline double quartile(const std::vector<std::int64_t>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return static_cast<double>(sorted.back());
  return static_cast<double>(sorted[lo]) +
         frac * static_cast<double>(sorted[lo + 1] - sorted[lo]);
}

}  // namespace detect_detail

// Ids whose count exceeds the upper IQR fence. Fewer than four
// neighbors leave the quartiles unsupported: empty set.
inline std::set<NodeId> iqr_flags(const std::vector<std::pair<NodeId, std::int64_t>>& counts,
                                  double fence_k = 1.5) {
  std::set<NodeId> out;
  if (counts.size() < 4) return out;
  std::vector<std::int64_t> values;
  values.reserve(counts.size());
  for (const auto& [id, c] : counts) values.push_back(c);
  std::sort(values.begin(), values.end());
  const double q1 = detect_detail::quartile(values, 0.25);
  const double q3 = detect_detail::quartile(values, 0.75);
  const double fence = q3 + fence_k * (q3 - q1);
  for (const auto& [id, c] : counts) {
    if (static_cast<double>(c) > fence) out.insert(id);
  }
  return out;
}

inline double iqr_fence(const std::vector<std::pair<NodeId, std::int64_t>>& counts,
                        double fence_k = 1.5) {
  if (counts.size() < 4) return 0.0;
  std::vector<std::int64_t> values;
  values.reserve(counts.size());
  for (const auto& [id, c] : counts) values.push_back(c);
  std::sort(values.begin(), values.end());
  const double q1 = detect_detail::quartile(values, 0.25);
  const double q3 = detect_detail::quartile(values, 0.75);
  return q3 + fence_k * (q3 - q1);
}

inline std::vector<std::pair<NodeId, std::int64_t>> count_list(const DioWindow& w) {
  return {w.counts.begin(), w.counts.end()};
}

// Applies iqr_flags per legitimate observer per tumbling window over
// the run's decoded DIOs.
inline std::vector<FlagRecord> monitor(const Trace& trace,
                                       std::int64_t window_us = 60 * kUsPerSecond,
                                       double fence_k = 1.5) {
  std::vector<FlagRecord> out;
  if (window_us <= 0 || trace.sim_end_us <= 0) return out;
  // (window index, observer) -> counts of decoded DIOs per claimed id
  std::map<std::pair<std::int64_t, NodeId>, DioWindow> windows;
  for (const auto& r : trace.records) {
    if (r.kind != Rec::DioRx) continue;
    DioWindow& w = windows[{r.t_us / window_us, r.a}];
    w.window_us = window_us;
    w.counts[r.b] += 1;
  }
  for (const auto& [key, w] : windows) {
    const auto list = count_list(w);
    const auto flags = iqr_flags(list, fence_k);
    if (flags.empty()) continue;
    const double fence = iqr_fence(list, fence_k);
    for (NodeId id : flags) {
      FlagRecord fr;
      fr.window_start_us = key.first * window_us;
      fr.observer = key.second;
      fr.flagged = id;
      fr.count = w.counts.at(id);
      fr.fence = fence;
      out.push_back(fr);
    }
  }
  return out;
}

}  // namespace rplsim

#endif  // RPLSIM_DETECT_HPP
