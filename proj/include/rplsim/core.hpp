// Core domain types shared by the whole simulator: node identity,
// positions, fixed-point simulation time, RPL rank arithmetic and
// packets. Scheduler keys are integer microseconds end to end; event
// timing never touches floating point.

#ifndef RPLSIM_CORE_HPP
#define RPLSIM_CORE_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rplsim {

using NodeId = std::int32_t;

constexpr NodeId kBroadcast = -1;
constexpr NodeId kRootId = 0;

constexpr std::int64_t kUsPerSecond = 1'000'000;

// Simulation time, integer microseconds since the start of the run.
struct SimTime {
  std::int64_t us = 0;

  static constexpr SimTime zero() { return SimTime{0}; }
  static constexpr SimTime from_us(std::int64_t v) { return SimTime{v}; }
  static SimTime from_seconds(double s) {
    return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))};
  }
  double seconds() const { return static_cast<double>(us) * 1e-6; }

  friend constexpr bool operator==(SimTime a, SimTime b) { return a.us == b.us; }
  friend constexpr bool operator!=(SimTime a, SimTime b) { return a.us != b.us; }
  friend constexpr bool operator<(SimTime a, SimTime b) { return a.us < b.us; }
  friend constexpr bool operator<=(SimTime a, SimTime b) { return a.us <= b.us; }
  friend constexpr bool operator>(SimTime a, SimTime b) { return a.us > b.us; }
  friend constexpr bool operator>=(SimTime a, SimTime b) { return a.us >= b.us; }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.us + b.us}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.us - b.us}; }
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// ----------------------------------------------------------------- rank

constexpr std::uint32_t kMinHopRankIncrease = 256;
constexpr std::uint32_t kRootRank = 256;
constexpr std::uint32_t kMaxRank = 65535;
// Sentinel for a node that is not part of the DODAG.
constexpr std::uint32_t kInfiniteRank = 0xFFFFFFFFu;

struct Rank {
  std::uint32_t value = kInfiniteRank;
};

// Integer DAG level of a rank (floor of rank / MinHopRankIncrease).
// Ranks below the root rank are malformed.
inline int dag_rank(Rank r) {
  if (r.value < kRootRank) {
    throw std::invalid_argument("dag_rank: rank below root rank");
  }
  return static_cast<int>(r.value / kMinHopRankIncrease);
}

// -------------------------------------------------------------- packets

enum class PacketKind : std::uint8_t { DIO, DIS, DAO, DAO_ACK, DATA, PROBE, ACK };

inline const char* to_string(PacketKind k) {
  switch (k) {
    case PacketKind::DIO: return "DIO";
    case PacketKind::DIS: return "DIS";
    case PacketKind::DAO: return "DAO";
    case PacketKind::DAO_ACK: return "DAO_ACK";
    case PacketKind::DATA: return "DATA";
    case PacketKind::PROBE: return "PROBE";
    case PacketKind::ACK: return "ACK";
  }
  return "?";
}

// claimed_source is the source address written in the header; it
// differs from true_source only for spoofed replays.
struct Packet {
  PacketKind kind = PacketKind::DATA;
  NodeId true_source = kRootId;
  NodeId claimed_source = kRootId;
  NodeId destination = kBroadcast;
  Rank payload_rank{};          // DIO only
  int size_bytes = 0;
  SimTime created_at{};
  std::int64_t seq = 0;
  std::vector<NodeId> route;    // DAO: accumulated upward path; DAO_ACK: downward path
};

}  // namespace rplsim

#endif  // RPLSIM_CORE_HPP
