// Per-node RPL state: trickle timer, neighbor candidate table, rank
// computation under MRHOF / OF0 and preferred-parent selection. The
// pieces here are pure state transitions; the engine wires them to the
// medium and the event queue.

#ifndef RPLSIM_RPL_HPP
#define RPLSIM_RPL_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rplsim/core.hpp"
#include "rplsim/rng.hpp"
#include "rplsim/trace.hpp"

namespace rplsim {

enum class ObjFunc : std::uint8_t { MRHOF, OF0 };

// Protocol constants. Sizes approximate real 6LoWPAN control frames;
// the behavioral constants are Contiki-style defaults.
constexpr int kDioSizeBytes = 76;
constexpr int kDisSizeBytes = 6;
constexpr int kDaoBaseSizeBytes = 20;
constexpr int kDaoAckSizeBytes = 20;
constexpr int kProbeSizeBytes = 16;
constexpr int kAckSizeBytes = 11;

constexpr int kRedundancyK = 10;
constexpr std::uint32_t kParentHysteresis = 128;  // 0.5 * MinHopRankIncrease
constexpr int kProbeCount = 3;
constexpr std::int64_t kProbeSpacingUs = 1 * kUsPerSecond;
constexpr int kDaoRetries = 2;
constexpr std::int64_t kDaoTimeoutUs = 10 * kUsPerSecond;
constexpr std::int64_t kDisPeriodUs = 5 * kUsPerSecond;
// Preferred-parent link supervision: the ETX estimate is refreshed by a
// probe round roughly every minute (Contiki-style RPL probing).
constexpr std::int64_t kParentProbeIntervalUs = 60 * kUsPerSecond;
constexpr std::int64_t kParentProbeJitterUs = 30 * kUsPerSecond;

// A probe round's ETX: transmissions put on air over probes
// acknowledged, floored at the probe count and at 1. A re-measurement
// of a known link is averaged with the previous estimate.
inline double probe_round_etx(int transmissions, int acks, double previous = 0.0) {
  if (acks < 1) throw std::invalid_argument("probe_round_etx: needs at least one ack");
  const double measured = std::max(
      1.0, static_cast<double>(std::max(transmissions, kProbeCount)) / static_cast<double>(acks));
  return previous >= 1.0 ? 0.5 * (previous + measured) : measured;
}

// ---------------------------------------------------------------- rank

// MRHOF: parent + round(etx * MinHopRankIncrease); OF0: parent + one
// hop. Returns kInfiniteRank when the result would exceed the maximum
// representable rank, which makes the candidate unusable.
inline std::uint32_t compute_rank(ObjFunc of, std::uint32_t parent_rank, double etx) {
  if (parent_rank < kRootRank) {
    throw std::invalid_argument("compute_rank: parent rank below root rank");
  }
  if (of == ObjFunc::MRHOF && etx < 1.0) {
    throw std::invalid_argument("compute_rank: etx must be >= 1");
  }
  const std::uint64_t inc =
      of == ObjFunc::MRHOF
          ? static_cast<std::uint64_t>(std::llround(etx * kMinHopRankIncrease))
          : kMinHopRankIncrease;
  const std::uint64_t r = static_cast<std::uint64_t>(parent_rank) + inc;
  if (r > kMaxRank) return kInfiniteRank;
  return static_cast<std::uint32_t>(r);
}

// -------------------------------------------------------------- trickle

struct TrickleState {
  std::int64_t imin_us = 4 * kUsPerSecond;
  std::int64_t imax_us = 1050 * kUsPerSecond;
  std::int64_t interval_us = 4 * kUsPerSecond;
  int counter = 0;
  int redundancy_k = kRedundancyK;
  std::int64_t fire_at_us = 0;
  bool running = false;
  std::uint64_t epoch = 0;  // invalidates stale timer events

  // (Re)start at the minimum interval; the next fire lands in the
  // second half of the interval (RFC 6206 style jitter).
  void reset(std::int64_t now_us, RngStream& rng) {
    interval_us = imin_us;
    counter = 0;
    fire_at_us = now_us + rng.next_in(interval_us / 2, interval_us - 1);
    running = true;
    ++epoch;
  }

  void stop() {
    running = false;
    ++epoch;
  }

  // Timer expiry: returns true when the DIO should be transmitted
  // (suppressed when enough consistent DIOs were already heard), then
  // doubles the interval and draws the next fire time.
  bool on_fire(std::int64_t now_us, RngStream& rng) {
    const bool transmit = counter < redundancy_k;
    interval_us = std::min(interval_us * 2, imax_us);
    counter = 0;
    fire_at_us = now_us + rng.next_in(interval_us / 2, interval_us - 1);
    ++epoch;
    return transmit;
  }
};

// ------------------------------------------------------------ neighbors

struct NeighborEntry {
  NodeId neighbor = -1;      // claimed identity heard on the air
  Rank last_rank{};
  double etx = 0.0;          // measured by probing; 0 until verified
  bool probe_verified = false;
  std::int64_t dio_count = 0;
};

struct ProbeRound {
  NodeId candidate = -1;
  int sent = 0;
  int acked = 0;
  int resolved = 0;
  int transmissions = 0;  // frames put on air across the round
  std::uint64_t epoch = 0;
};

struct DaoState {
  bool pending = false;
  bool confirmed = false;
  int retries_left = 0;
  std::uint64_t epoch = 0;
};

struct NodeState {
  NodeId id = 0;
  Role role = Role::SENSOR;
  ObjFunc of = ObjFunc::MRHOF;
  std::uint32_t rank = kInfiniteRank;
  std::optional<NodeId> preferred_parent;
  std::map<NodeId, NeighborEntry> candidates;
  TrickleState trickle;
  std::optional<ProbeRound> probe;
  std::uint64_t probe_epoch = 0;
  DaoState dao;
  std::uint64_t dis_epoch = 0;
  // Root only: downward routes recorded from DAOs (origin -> full path).
  std::map<NodeId, std::vector<NodeId>> downward_routes;

  bool joined() const {
    return role == Role::ROOT || (preferred_parent.has_value() && rank < kInfiniteRank);
  }
};

// ------------------------------------------------------------ selection

// Live state of a candidate as parent selection is allowed to see it.
// For legitimate nodes the engine reports their current joined state
// and rank, standing in for the poisoning DIOs a real network would
// send; an attacker's claimed identity is taken at face value.
struct LiveParentInfo {
  bool joined = false;
  std::uint32_t rank = kInfiniteRank;
  bool opaque = false;  // true: advertised rank is all anyone can know
};

struct SelectionResult {
  bool changed = false;        // parent switched or first join
  bool detached = false;       // no eligible candidate remained
  bool rank_refreshed = false; // same parent, recomputed rank differs
  std::uint32_t new_rank = kInfiniteRank;
  std::optional<NodeId> parent;
  std::vector<NodeId> probe_wanted;  // unverified candidates worth probing (MRHOF)
};

// Preferred-parent choice. MRHOF considers only probe-verified
// candidates and applies a switch hysteresis; OF0 takes advertised
// ranks as-is. Ties break toward the lower node id.
template <typename LiveView>
SelectionResult select_preferred_parent(const NodeState& node, LiveView&& live_view) {
  SelectionResult out;
  std::optional<NodeId> best;
  std::uint32_t best_path = kInfiniteRank;
  std::optional<std::uint32_t> current_path;

  for (const auto& [cid, e] : node.candidates) {
    if (cid == node.id) continue;
    const LiveParentInfo info = live_view(cid);
    if (!info.joined) continue;
    const std::uint32_t eff_rank =
        info.opaque ? e.last_rank.value : std::max(e.last_rank.value, info.rank);
    if (eff_rank >= kInfiniteRank) continue;

    std::uint32_t path = kInfiniteRank;
    if (node.of == ObjFunc::MRHOF) {
      if (!e.probe_verified) {
        // Link quality must be measured before a neighbor can enter the
        // candidate parent set: every unverified claimed neighbor gets
        // assessed.
        out.probe_wanted.push_back(cid);
        continue;
      }
      path = compute_rank(ObjFunc::MRHOF, eff_rank, e.etx);
    } else {
      path = compute_rank(ObjFunc::OF0, eff_rank, 1.0);
    }
    if (path == kInfiniteRank) continue;

    if (node.preferred_parent && cid == *node.preferred_parent) current_path = path;
    if (path < best_path || (path == best_path && best && cid < *best)) {
      best_path = path;
      best = cid;
    }
  }

  if (current_path) {
    // Keep the current parent unless a challenger wins by the
    // hysteresis margin.
    if (best && *best != *node.preferred_parent &&
        best_path + kParentHysteresis <= *current_path) {
      out.changed = true;
      out.parent = best;
      out.new_rank = best_path;
    } else {
      out.parent = node.preferred_parent;
      out.new_rank = *current_path;
      out.rank_refreshed = *current_path != node.rank;
    }
    return out;
  }

  if (best) {
    out.changed = true;
    out.parent = best;
    out.new_rank = best_path;
    return out;
  }

  out.detached = true;
  return out;
}

}  // namespace rplsim

#endif  // RPLSIM_RPL_HPP
