// Replaying attacker behavior: once active, the node stores the first
// DIO it manages to decode and re-broadcasts it forever on a fixed
// timer, either under its own identity (non-spoofed) or under the
// original sender's (spoofed). Every other protocol function of the
// node is disabled: it never answers probes, DAOs or data, never picks
// a parent and never becomes one.

#ifndef RPLSIM_ATTACK_HPP
#define RPLSIM_ATTACK_HPP

#include <cstdint>
#include <optional>

#include "rplsim/core.hpp"

namespace rplsim {

enum class AttackVariant : std::uint8_t { NONE, NON_SPOOFED, SPOOFED };

inline const char* to_string(AttackVariant v) {
  switch (v) {
    case AttackVariant::NONE: return "none";
    case AttackVariant::NON_SPOOFED: return "non_spoofed";
    case AttackVariant::SPOOFED: return "spoofed";
  }
  return "?";
}

struct AttackerState {
  AttackVariant variant = AttackVariant::NON_SPOOFED;
  std::int64_t replay_interval_us = 1 * kUsPerSecond;
  std::int64_t active_since_us = 90 * kUsPerSecond;
  bool listening = false;
  std::optional<Packet> captured_dio;
  std::uint64_t replay_epoch = 0;
};

// Handle a decoded DIO at the attacker. Only the first DIO heard after
// activation is stored; everything later is ignored. Returns true when
// this call captured (the caller then arms the replay timer).
inline bool attacker_on_dio(AttackerState& st, const Packet& dio, SimTime t) {
  if (t.us < st.active_since_us || !st.listening) return false;
  if (st.captured_dio.has_value()) return false;
  st.captured_dio = dio;
  return true;
}

// Build the frame for one replay: a verbatim copy of the captured DIO,
// with the header source rewritten to the attacker's own id in the
// non-spoofed variant and left as the original sender's in the spoofed
// one.
inline Packet attacker_replay_packet(const AttackerState& st, NodeId attacker_id) {
  Packet p = *st.captured_dio;
  p.true_source = attacker_id;
  p.claimed_source =
      st.variant == AttackVariant::SPOOFED ? st.captured_dio->claimed_source : attacker_id;
  p.destination = kBroadcast;
  return p;
}

}  // namespace rplsim

#endif  // RPLSIM_ATTACK_HPP
