// Simplified lossy wireless medium: unit-disk delivery, a wider
// interference disk, Bernoulli frame loss and CSMA with bounded
// backoff. Transmissions model a duty-cycled (low-power listening)
// link layer: receivers wake for a short channel check every
// wake_interval_s, so a broadcast occupies the medium for a full wake
// interval and a unicast strobes until the target's next wake slot.
// A reception succeeds only when exactly one audible transmission
// overlaps it at the receiver; there is no capture effect.

#ifndef RPLSIM_RADIO_HPP
#define RPLSIM_RADIO_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rplsim/core.hpp"
#include "rplsim/energy.hpp"
#include "rplsim/rng.hpp"

namespace rplsim {

struct RadioParams {
  double comm_range_m = 50.0;
  double interference_range_m = 100.0;
  double bitrate_bps = 250000.0;   // IEEE 802.15.4 at 2.4 GHz
  double base_loss_prob = 0.05;
  int csma_max_backoffs = 3;
  double backoff_window_s = 0.005;
  double wake_interval_s = 0.125;  // 8 Hz receive check
  double check_duration_s = 0.002;
  int mac_retries = 3;             // unicast only; broadcasts are fire-and-forget
  double mac_retry_window_s = 0.125;
  double phase_guard_s = 0.004;    // strobe lead once the peer's wake phase is known

  std::int64_t wake_us() const {
    return static_cast<std::int64_t>(wake_interval_s * 1e6 + 0.5);
  }
  std::int64_t check_us() const {
    return static_cast<std::int64_t>(check_duration_s * 1e6 + 0.5);
  }
  std::int64_t backoff_window_us() const {
    return static_cast<std::int64_t>(backoff_window_s * 1e6 + 0.5);
  }
  std::int64_t mac_retry_window_us() const {
    return static_cast<std::int64_t>(mac_retry_window_s * 1e6 + 0.5);
  }
  std::int64_t phase_guard_us() const {
    return static_cast<std::int64_t>(phase_guard_s * 1e6 + 0.5);
  }
};

// Frame airtime in seconds: (size * 8) / bitrate.
inline double airtime(int size_bytes, const RadioParams& p) {
  if (size_bytes <= 0) {
    throw std::invalid_argument("airtime: packet size must be positive");
  }
  return static_cast<double>(size_bytes) * 8.0 / p.bitrate_bps;
}

// Airtime rounded up to the microsecond grid the scheduler runs on.
inline std::int64_t airtime_us(int size_bytes, const RadioParams& p) {
  if (size_bytes <= 0) {
    throw std::invalid_argument("airtime: packet size must be positive");
  }
  const std::int64_t bits = static_cast<std::int64_t>(size_bytes) * 8 * kUsPerSecond;
  const std::int64_t rate = static_cast<std::int64_t>(p.bitrate_bps);
  return (bits + rate - 1) / rate;
}

// Pure reception rule shared by every delivery path: success iff the
// frame is the only audible transmission overlapping its interval at
// the receiver and the loss draw passes.
inline bool resolve_reception(int audible_overlaps_including_self, RngStream& receiver_rng,
                              double base_loss_prob) {
  const bool clean = audible_overlaps_including_self == 1;
  const bool lucky = receiver_rng.bernoulli(1.0 - base_loss_prob);
  return clean && lucky;
}

// ----------------------------------------------------------------------
// Medium: bookkeeping of every strobe (occupied interval) on the air.
// Strobes are registered when the sender acquires the channel and
// closed when it stops; while open their final end is unknown, which is
// fine because every overlap query happens at a moment the open strobe
// provably still covers.
// ----------------------------------------------------------------------
class Medium {
 public:
  struct Strobe {
    NodeId sender = -1;
    std::int64_t start_us = 0;
    std::int64_t end_us = -1;  // -1 while open
  };

  Medium(const RadioParams& params, const std::vector<Position>& positions)
      : params_(params), positions_(positions) {
    const double air127 = 127.0 * 8.0 / params.bitrate_bps;
    max_strobe_us_ = params.wake_us() + static_cast<std::int64_t>(air127 * 2e6) + 2000;
  }

  bool in_comm(NodeId a, NodeId b) const {
    return distance(positions_[a], positions_[b]) <= params_.comm_range_m;
  }
  bool audible(NodeId listener, NodeId sender) const {
    return distance(positions_[listener], positions_[sender]) <= params_.interference_range_m;
  }

  // Carrier sense: any open strobe the node itself owns or can hear.
  bool busy_for(NodeId node) const {
    for (int idx : open_) {
      const Strobe& st = strobes_[idx];
      if (st.sender == node || audible(node, st.sender)) return true;
    }
    return false;
  }

  int begin(NodeId sender, std::int64_t start_us) {
    strobes_.push_back(Strobe{sender, start_us, -1});
    const int idx = static_cast<int>(strobes_.size()) - 1;
    open_.push_back(idx);
    return idx;
  }

  void close(int idx, std::int64_t end_us) {
    strobes_[idx].end_us = end_us;
    for (std::size_t i = 0; i < open_.size(); ++i) {
      if (open_[i] == idx) {
        open_[i] = open_.back();
        open_.pop_back();
        break;
      }
    }
  }

  const Strobe& strobe(int idx) const { return strobes_[idx]; }

  // Number of audible transmissions at `receiver` overlapping [s, e),
  // including the frame itself. Queried at e, so any still-open strobe
  // extends at least to the query time. The receiver's own strobes do
  // not count: a strobing sender pauses between frame copies to listen.
  int audible_overlaps(NodeId receiver, int self_idx, std::int64_t s, std::int64_t e) const {
    int count = 1;
    const std::int64_t horizon = s - max_strobe_us_;
    for (int i = static_cast<int>(strobes_.size()) - 1; i >= 0; --i) {
      if (i == self_idx) continue;
      const Strobe& st = strobes_[i];
      if (st.start_us < horizon) break;  // registered in start order
      if (st.start_us >= e) continue;
      const bool overlaps = st.end_us < 0 || st.end_us > s;
      if (!overlaps) continue;
      if (st.sender == receiver) continue;
      if (audible(receiver, st.sender)) ++count;
    }
    return count;
  }

  // True when the node itself transmitted during [s, e) (half-duplex:
  // it cannot decode a frame while strobing one of its own).
  bool own_tx_overlap(NodeId node, int self_idx, std::int64_t s, std::int64_t e) const {
    const std::int64_t horizon = s - max_strobe_us_;
    for (int i = static_cast<int>(strobes_.size()) - 1; i >= 0; --i) {
      if (i == self_idx) continue;
      const Strobe& st = strobes_[i];
      if (st.start_us < horizon) break;
      if (st.sender != node) continue;
      if (st.start_us >= e) continue;
      if (st.end_us < 0 || st.end_us > s) return true;
    }
    return false;
  }

  // End-of-run cleanup: cap every still-open strobe at the horizon and
  // hand it to the caller for bookkeeping.
  template <typename Fn>
  void close_all_open(std::int64_t end_us, Fn&& book) {
    std::vector<int> open = open_;
    for (int idx : open) {
      close(idx, end_us);
      book(strobes_[static_cast<std::size_t>(idx)].sender, idx);
    }
  }

 private:
  RadioParams params_;
  const std::vector<Position>& positions_;
  std::vector<Strobe> strobes_;
  std::vector<int> open_;
  std::int64_t max_strobe_us_;
};

}  // namespace rplsim

#endif  // RPLSIM_RADIO_HPP
