// Deterministic discrete-event engine. One Simulation owns the full
// state of a run: node protocol state, the radio medium, per-node
// energy bookkeeping and the trace. Event order is a pure function of
// (config, seed): times are integer microseconds and same-time events
// are ordered by a fixed kind priority, then insertion sequence.

#ifndef RPLSIM_ENGINE_HPP
#define RPLSIM_ENGINE_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "rplsim/attack.hpp"
#include "rplsim/core.hpp"
#include "rplsim/energy.hpp"
#include "rplsim/metrics.hpp"
#include "rplsim/radio.hpp"
#include "rplsim/rng.hpp"
#include "rplsim/rpl.hpp"
#include "rplsim/stats.hpp"
#include "rplsim/trace.hpp"

namespace rplsim {

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------ scenario

struct TopologyNode {
  NodeId id = 0;
  Position pos{};
  Role role = Role::SENSOR;
};

struct ScenarioConfig {
  double area_m = 200.0;
  int n_sensors = 30;
  int n_attackers = 5;
  double sim_seconds = 1800.0;
  ObjFunc objective_function = ObjFunc::MRHOF;
  double dio_imin_s = 4.0;
  double dio_imax_s = 1050.0;  // 17.5 minutes
  double replay_interval_s = 1.0;
  double data_interval_s = 60.0;
  int data_size_bytes = 30;
  double tx_power_dbm = 0.0;  // informational; the disk model has no power knob
  double attacker_activation_s = 90.0;
  AttackVariant attack_variant = AttackVariant::NONE;
  std::uint64_t seed = 1;
  int replications = 10;

  RadioParams radio;
  ElectricalProfile profile;
  double detector_window_s = 60.0;
  double detector_fence_k = 1.5;
  // Non-empty: skip random placement and use these nodes verbatim
  // (scripted topologies in tests).
  std::vector<TopologyNode> fixed_topology;

  std::int64_t sim_end_us() const {
    return static_cast<std::int64_t>(sim_seconds * 1e6 + 0.5);
  }
  std::int64_t replay_interval_us() const {
    return static_cast<std::int64_t>(replay_interval_s * 1e6 + 0.5);
  }
  std::int64_t data_interval_us() const {
    return static_cast<std::int64_t>(data_interval_s * 1e6 + 0.5);
  }
  std::int64_t activation_us() const {
    return static_cast<std::int64_t>(attacker_activation_s * 1e6 + 0.5);
  }
  std::int64_t imin_us() const { return static_cast<std::int64_t>(dio_imin_s * 1e6 + 0.5); }
  std::int64_t imax_us() const { return static_cast<std::int64_t>(dio_imax_s * 1e6 + 0.5); }
};

// ------------------------------------------------------------- topology

namespace detail {

// Every non-attacker node must reach the root over comm-range links
// that traverse only non-attacker nodes (attackers do not forward).
inline bool root_reachable(const std::vector<TopologyNode>& nodes, double comm_range) {
  const std::size_t n = nodes.size();
  std::vector<bool> visited(n, false);
  std::vector<std::size_t> stack{0};
  visited[0] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      if (visited[v] || nodes[v].role == Role::ATTACKER) continue;
      if (distance(nodes[u].pos, nodes[v].pos) <= comm_range) {
        visited[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (nodes[v].role != Role::ATTACKER && !visited[v]) return false;
  }
  return true;
}

}  // namespace detail

// One root plus n_sensors nodes placed uniformly at random in the area;
// n_attackers of the non-root nodes are re-rolled as attackers.
// Placements regenerate until the root-reachability check passes.
inline std::vector<TopologyNode> generate_topology(const ScenarioConfig& cfg, RngStream& rng) {
  if (cfg.n_sensors < 1) {
    throw TopologyError("generate_topology: n_sensors must be >= 1");
  }
  if (cfg.n_attackers < 0 || cfg.n_attackers > cfg.n_sensors) {
    throw TopologyError("generate_topology: n_attackers out of range");
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<TopologyNode> nodes(static_cast<std::size_t>(cfg.n_sensors) + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nodes[i].id = static_cast<NodeId>(i);
      nodes[i].pos.x = rng.next_double() * cfg.area_m;
      nodes[i].pos.y = rng.next_double() * cfg.area_m;
      nodes[i].role = i == 0 ? Role::ROOT : Role::SENSOR;
    }
    // Partial Fisher-Yates over the non-root ids.
    std::vector<NodeId> ids(static_cast<std::size_t>(cfg.n_sensors));
    for (int i = 0; i < cfg.n_sensors; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
    for (int k = 0; k < cfg.n_attackers; ++k) {
      const auto j = static_cast<std::size_t>(
          rng.next_in(k, cfg.n_sensors - 1));
      std::swap(ids[static_cast<std::size_t>(k)], ids[j]);
      nodes[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])].role = Role::ATTACKER;
    }
    if (detail::root_reachable(nodes, cfg.radio.comm_range_m)) return nodes;
  }
  throw TopologyError("generate_topology: no root-reachable placement after 100 retries");
}

// ------------------------------------------------------------- events

enum class EventKind : std::uint8_t {
  TX_END = 0,
  RX_DELIVER = 1,
  TIMER_FIRE = 2,
  APP_GENERATE = 3,
  TX_START = 4,
  ATTACKER_ACTIVATE = 5,
  SAMPLE_ENERGY = 6,
};

enum class TimerKind : std::uint8_t {
  TrickleFire,
  DisSolicit,
  ProbeStep,
  DaoTimeout,
  ReplayFire,
  ParentProbe,
};

enum class TxEndSub : std::uint8_t { Broadcast, UnicastData, Ack, Fail };

struct Event {
  std::int64_t t_us = 0;
  std::uint8_t priority = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::TIMER_FIRE;
  NodeId target = -1;
  TimerKind timer = TimerKind::TrickleFire;
  std::uint64_t epoch = 0;
  TxEndSub sub = TxEndSub::Broadcast;
  int strobe = -1;
  int aux_strobe = -1;
  NodeId peer = -1;
  bool locked = false;  // unicast sent with known receiver phase
  bool has_pkt = false;
  Packet pkt;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t_us != b.t_us) return a.t_us > b.t_us;
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.seq > b.seq;
  }
};

// ---------------------------------------------------------- simulation

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg) : cfg_(cfg) {
    if (cfg_.replay_interval_s <= 0.0) {
      throw std::invalid_argument("replay_interval_s must be positive");
    }
    topo_rng_ = RngStream(derive_seed(cfg_.seed, 0x70501ULL));
    auto topo =
        cfg_.fixed_topology.empty() ? generate_topology(cfg_, topo_rng_) : cfg_.fixed_topology;
    positions_.reserve(topo.size());
    for (auto& tn : topo) positions_.push_back(tn.pos);
    medium_.emplace(cfg_.radio, positions_);
    init_nodes(topo);
  }

  Trace run() {
    const std::int64_t end = cfg_.sim_end_us();
    schedule_initial();
    while (!queue_.empty() && queue_.top().t_us <= end) {
      const Event ev = queue_.top();
      queue_.pop();
      now_ = ev.t_us;
      dispatch(ev);
    }
    now_ = end;
    finalize();
    return std::move(trace_);
  }

 private:
  // ----------------------------------------------------------- frames

  enum class Purpose : std::uint8_t {
    Data, DioTrickle, DioReply, DioReplay, Dis, Dao, DaoAck, Probe
  };

  struct PendingFrame {
    Packet pkt;
    NodeId link_dst = kBroadcast;
    Purpose purpose = Purpose::Data;
    int attempts_left = 1;
    int csma_left = 0;
    bool attempt_counted = false;
    std::uint64_t probe_epoch = 0;
  };

  struct NodeRuntime {
    NodeState st;
    AttackerState atk;
    std::deque<PendingFrame> txq;
    bool tx_busy = false;
    bool tx_start_pending = false;
    RngStream rng;
    std::int64_t phase_us = 0;
    std::int64_t data_seq = 0;
    std::vector<TimeSpan> tx_spans;
    std::vector<TimeSpan> audible_spans;
    std::vector<std::int64_t> cpu_times;
    std::unordered_set<std::uint64_t> seen_data;
    std::vector<bool> phase_known;  // per peer, learned on first MAC success
    int parent_fail_streak = 0;     // consecutive routed-frame losses to the parent
  };

  // ------------------------------------------------------------ setup

  void init_nodes(const std::vector<TopologyNode>& topo) {
    // Without an attack variant the flagged nodes behave as the plain
    // sensors they were before compromise; placements stay identical
    // across baseline and attacked runs of the same seed.
    const bool attack_on = cfg_.attack_variant != AttackVariant::NONE;
    nodes_.resize(topo.size());
    for (std::size_t i = 0; i < topo.size(); ++i) {
      NodeRuntime& rt = nodes_[i];
      rt.st.id = topo[i].id;
      rt.st.role = attack_on ? topo[i].role
                             : (topo[i].role == Role::ROOT ? Role::ROOT : Role::SENSOR);
      rt.st.of = cfg_.objective_function;
      rt.st.trickle.imin_us = cfg_.imin_us();
      rt.st.trickle.imax_us = cfg_.imax_us();
      rt.rng = RngStream(derive_seed(cfg_.seed, 0x40DEULL, static_cast<std::uint64_t>(i)));
      rt.phase_us = rt.rng.next_in(0, cfg_.radio.wake_us() - 1);
      rt.phase_known.assign(topo.size(), false);
      if (rt.st.role == Role::ATTACKER) {
        rt.atk.variant = cfg_.attack_variant;
        rt.atk.replay_interval_us = cfg_.replay_interval_us();
        rt.atk.active_since_us = cfg_.activation_us();
      }
      NodeInfo info;
      info.id = rt.st.id;
      info.pos = topo[i].pos;
      info.role = rt.st.role;
      info.phase_us = rt.phase_us;
      trace_.nodes.push_back(info);
    }
    nodes_[0].st.rank = kRootRank;
    trace_.sim_end_us = cfg_.sim_end_us();
    trace_.energy_bin_us = 60 * kUsPerSecond;
    trace_.wake_us = cfg_.radio.wake_us();
    trace_.check_us = cfg_.radio.check_us();
    trace_.profile = cfg_.profile;
  }

  void schedule_initial() {
    const std::int64_t end = cfg_.sim_end_us();
    trickle_reset(kRootId);
    for (auto& rt : nodes_) {
      if (rt.st.role == Role::ROOT) continue;
      if (rt.st.role == Role::ATTACKER) {
        Event ev;
        ev.kind = EventKind::ATTACKER_ACTIVATE;
        ev.target = rt.st.id;
        schedule(cfg_.activation_us(), ev);
        continue;
      }
      // Unjoined sensors solicit DIOs after 5 s.
      rt.st.dis_epoch = 1;
      schedule_timer(rt.st.id, TimerKind::DisSolicit, kDisPeriodUs, rt.st.dis_epoch);
      schedule_timer(rt.st.id, TimerKind::ParentProbe,
                     kParentProbeIntervalUs + rt.rng.next_in(0, kParentProbeJitterUs), 0);
      // Each sensor's application runs on its own phase within the
      // sending interval; the per-run packet count stays exactly
      // floor(sim_seconds / data_interval_s).
      const std::int64_t first = rt.rng.next_in(1, cfg_.data_interval_us());
      if (first <= end) {
        Event ev;
        ev.kind = EventKind::APP_GENERATE;
        ev.target = rt.st.id;
        schedule(first, ev);
      }
    }
    const std::int64_t bin = trace_.energy_bin_us;
    for (std::int64_t b = bin, k = 1; b <= end; b += bin, ++k) {
      Event ev;
      ev.kind = EventKind::SAMPLE_ENERGY;
      ev.epoch = static_cast<std::uint64_t>(k);
      schedule(b, ev);
    }
  }

  // --------------------------------------------------------- plumbing

  void schedule(std::int64_t t, Event ev) {
    ev.t_us = t;
    ev.priority = static_cast<std::uint8_t>(ev.kind);
    ev.seq = seq_++;
    queue_.push(std::move(ev));
  }

  void schedule_timer(NodeId n, TimerKind k, std::int64_t delay, std::uint64_t epoch) {
    Event ev;
    ev.kind = EventKind::TIMER_FIRE;
    ev.target = n;
    ev.timer = k;
    ev.epoch = epoch;
    schedule(now_ + delay, ev);
  }

  void rec(Rec kind, NodeId a = -1, NodeId b = -1, std::int64_t x = 0, std::int64_t y = 0) {
    trace_.records.push_back(TraceRecord{now_, kind, a, b, x, y});
  }

  void cpu_event(NodeId n) {
    nodes_[static_cast<std::size_t>(n)].cpu_times.push_back(now_);
    rec(Rec::CpuEvent, n);
  }

  NodeRuntime& node(NodeId n) { return nodes_[static_cast<std::size_t>(n)]; }

  std::int64_t phase_delay(NodeId dst, std::int64_t t) const {
    const std::int64_t w = cfg_.radio.wake_us();
    const std::int64_t ph = nodes_[static_cast<std::size_t>(dst)].phase_us;
    return ((ph - t) % w + w) % w;
  }

  static std::uint64_t data_key(NodeId origin, std::int64_t seq) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(origin)) << 32) |
           static_cast<std::uint32_t>(seq);
  }

  // --------------------------------------------------------- dispatch

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::TX_END: on_tx_end(ev); break;
      case EventKind::RX_DELIVER: on_rx(ev.target, ev.pkt, ev.peer); break;
      case EventKind::TIMER_FIRE: on_timer(ev); break;
      case EventKind::APP_GENERATE: on_app_generate(ev.target); break;
      case EventKind::TX_START: on_tx_start(ev.target); break;
      case EventKind::ATTACKER_ACTIVATE:
        node(ev.target).atk.listening = true;
        break;
      case EventKind::SAMPLE_ENERGY:
        rec(Rec::SampleEnergy, -1, -1, static_cast<std::int64_t>(ev.epoch));
        break;
    }
  }

  // ------------------------------------------------------ application

  void on_app_generate(NodeId n) {
    NodeRuntime& rt = node(n);
    const std::int64_t seq = ++rt.data_seq;
    rec(Rec::AppGenerate, n, -1, seq);
    ++trace_.counters.generated;
    if (rt.st.joined()) {
      Packet p;
      p.kind = PacketKind::DATA;
      p.true_source = n;
      p.claimed_source = n;
      p.destination = kRootId;
      p.size_bytes = cfg_.data_size_bytes;
      p.created_at = SimTime::from_us(now_);
      p.seq = seq;
      enqueue_frame(n, p, *rt.st.preferred_parent, Purpose::Data);
    } else {
      rec(Rec::DataNoRoute, n, -1, seq);
      ++trace_.counters.no_route_drops;
    }
    const std::int64_t next = now_ + cfg_.data_interval_us();
    if (next <= cfg_.sim_end_us()) {
      Event nx;
      nx.kind = EventKind::APP_GENERATE;
      nx.target = n;
      schedule(next, nx);
    }
  }

  // -------------------------------------------------------------- MAC

  void enqueue_frame(NodeId n, const Packet& pkt, NodeId link_dst, Purpose purpose,
                     std::uint64_t probe_epoch = 0) {
    NodeRuntime& rt = node(n);
    PendingFrame f;
    f.pkt = pkt;
    f.link_dst = link_dst;
    f.purpose = purpose;
    f.attempts_left = link_dst == kBroadcast ? 1 : 1 + cfg_.radio.mac_retries;
    f.csma_left = cfg_.radio.csma_max_backoffs;
    f.probe_epoch = probe_epoch;
    rt.txq.push_back(std::move(f));
    if (!rt.tx_busy && !rt.tx_start_pending) {
      rt.tx_start_pending = true;
      Event ev;
      ev.kind = EventKind::TX_START;
      ev.target = n;
      schedule(now_, ev);
    }
  }

  void on_tx_start(NodeId n) {
    NodeRuntime& rt = node(n);
    rt.tx_start_pending = false;
    if (rt.txq.empty() || rt.tx_busy) return;
    PendingFrame& f = rt.txq.front();
    if (!f.attempt_counted) {
      f.attempt_counted = true;
      if (f.purpose == Purpose::Data && f.pkt.true_source == n) {
        rec(Rec::DataOriginAttempt, n, -1, f.pkt.seq);
        ++trace_.counters.origin_attempts;
      }
    }
    // With the peer's wake phase known the sender stays silent until
    // shortly before the wake slot instead of strobing a full interval.
    const bool locked = f.link_dst != kBroadcast &&
                        rt.phase_known[static_cast<std::size_t>(f.link_dst)];
    if (locked) {
      const std::int64_t dw = phase_delay(f.link_dst, now_);
      if (dw > cfg_.radio.phase_guard_us()) {
        rt.tx_start_pending = true;
        Event ev;
        ev.kind = EventKind::TX_START;
        ev.target = n;
        schedule(now_ + dw - cfg_.radio.phase_guard_us(), ev);
        return;
      }
    }
    if (medium_->busy_for(n)) {
      if (f.csma_left > 0) {
        --f.csma_left;
        rt.tx_start_pending = true;
        Event ev;
        ev.kind = EventKind::TX_START;
        ev.target = n;
        schedule(now_ + rt.rng.next_in(1, cfg_.radio.backoff_window_us()), ev);
      } else {
        rec(Rec::ChannelDrop, n, -1, static_cast<std::int64_t>(f.pkt.kind));
        ++trace_.counters.channel_drops;
        consume_attempt(n);
      }
      return;
    }
    // Channel acquired.
    if (rt.st.role == Role::ATTACKER && now_ < cfg_.activation_us()) {
      ++trace_.counters.attacker_tx_before_activation;
    }
    const int idx = medium_->begin(n, now_);
    rt.tx_busy = true;
    cpu_event(n);
    if (f.purpose == Purpose::Probe && rt.st.probe && rt.st.probe->epoch == f.probe_epoch) {
      ++rt.st.probe->transmissions;
    }
    if (f.link_dst == kBroadcast) {
      if (f.purpose == Purpose::DioReplay) {
        rec(Rec::ReplayTx, n, f.pkt.claimed_source,
            static_cast<std::int64_t>(f.pkt.payload_rank.value));
      }
      Event ev;
      ev.kind = EventKind::TX_END;
      ev.sub = TxEndSub::Broadcast;
      ev.target = n;
      ev.strobe = idx;
      schedule(now_ + cfg_.radio.wake_us(), ev);
    } else {
      const std::int64_t dw = phase_delay(f.link_dst, now_);
      const std::int64_t air = airtime_us(f.pkt.size_bytes, cfg_.radio);
      Event ev;
      ev.kind = EventKind::TX_END;
      ev.sub = TxEndSub::UnicastData;
      ev.target = n;
      ev.strobe = idx;
      ev.peer = f.link_dst;
      ev.locked = locked;
      schedule(now_ + dw + air, ev);
    }
  }

  void book_strobe(NodeId sender, int idx) {
    const auto& st = medium_->strobe(idx);
    NodeRuntime& rt = node(sender);
    rt.tx_spans.push_back({st.start_us, st.end_us});
    rec(Rec::RadioTx, sender, -1, st.start_us, st.end_us);
    for (std::size_t o = 0; o < nodes_.size(); ++o) {
      const NodeId oid = static_cast<NodeId>(o);
      if (oid == sender) continue;
      if (!medium_->audible(oid, sender)) continue;
      nodes_[o].audible_spans.push_back({st.start_us, st.end_us});
      rec(Rec::RadioAudible, oid, -1, st.start_us, st.end_us);
    }
  }

  std::int64_t fail_end(std::int64_t strobe_start, std::int64_t floor_end) const {
    return std::max(floor_end, strobe_start + cfg_.radio.wake_us());
  }

  void on_tx_end(const Event& ev) {
    switch (ev.sub) {
      case TxEndSub::Broadcast: end_broadcast(ev); break;
      case TxEndSub::UnicastData: end_unicast_data(ev); break;
      case TxEndSub::Ack: end_ack(ev); break;
      case TxEndSub::Fail: end_fail(ev); break;
    }
  }

  void end_broadcast(const Event& ev) {
    const NodeId n = ev.target;
    NodeRuntime& rt = node(n);
    PendingFrame& f = rt.txq.front();
    medium_->close(ev.strobe, now_);
    const auto st = medium_->strobe(ev.strobe);
    book_strobe(n, ev.strobe);
    for (std::size_t o = 0; o < nodes_.size(); ++o) {
      const NodeId oid = static_cast<NodeId>(o);
      if (oid == n || !medium_->in_comm(oid, n)) continue;
      if (medium_->own_tx_overlap(oid, ev.strobe, st.start_us, now_)) continue;
      const int overlaps = medium_->audible_overlaps(oid, ev.strobe, st.start_us, now_);
      if (!resolve_reception(overlaps, nodes_[o].rng, cfg_.radio.base_loss_prob)) continue;
      Event rx;
      rx.kind = EventKind::RX_DELIVER;
      rx.target = oid;
      rx.peer = n;
      rx.has_pkt = true;
      rx.pkt = f.pkt;
      schedule(now_, rx);
    }
    finish_frame(n, true);
  }

  void end_unicast_data(const Event& ev) {
    const NodeId n = ev.target;
    const NodeId dst = ev.peer;
    NodeRuntime& rt = node(n);
    PendingFrame& f = rt.txq.front();
    const auto st = medium_->strobe(ev.strobe);
    const bool in_range = medium_->in_comm(n, dst);
    bool decoded = false;
    if (in_range && !medium_->own_tx_overlap(dst, ev.strobe, st.start_us, now_)) {
      const int overlaps = medium_->audible_overlaps(dst, ev.strobe, st.start_us, now_);
      decoded = resolve_reception(overlaps, node(dst).rng, cfg_.radio.base_loss_prob);
    }
    if (ev.locked) {
      // Short strobe: the transmission itself ends here, but the radio
      // stays committed to this MAC attempt until the ACK resolves.
      medium_->close(ev.strobe, now_);
      book_strobe(n, ev.strobe);
    }
    if (decoded) {
      Event rx;
      rx.kind = EventKind::RX_DELIVER;
      rx.target = dst;
      rx.peer = n;
      rx.has_pkt = true;
      rx.pkt = f.pkt;
      schedule(now_, rx);
      if (node(dst).st.role == Role::ATTACKER) {
        // Routing functions disabled: the attacker never acknowledges.
        unicast_no_ack(ev, st.start_us);
        return;
      }
      const int ack_idx = medium_->begin(dst, now_);
      Event ack;
      ack.kind = EventKind::TX_END;
      ack.sub = TxEndSub::Ack;
      ack.target = n;
      ack.peer = dst;
      ack.strobe = ack_idx;
      ack.aux_strobe = ev.strobe;
      ack.locked = ev.locked;
      schedule(now_ + airtime_us(kAckSizeBytes, cfg_.radio), ack);
      return;
    }
    unicast_no_ack(ev, st.start_us);
  }

  // No acknowledgment will come: a phase-locked sender gives up right
  // away, an unlocked one strobes out the full wake window first.
  void unicast_no_ack(const Event& ev, std::int64_t strobe_start) {
    if (ev.locked) {
      node(ev.target).tx_busy = false;
      consume_attempt(ev.target);
      return;
    }
    Event fe;
    fe.kind = EventKind::TX_END;
    fe.sub = TxEndSub::Fail;
    fe.target = ev.target;
    fe.strobe = ev.strobe;
    schedule(fail_end(strobe_start, now_), fe);
  }

  void end_ack(const Event& ev) {
    const NodeId sender = ev.target;
    const NodeId dst = ev.peer;
    medium_->close(ev.strobe, now_);
    const auto ack_st = medium_->strobe(ev.strobe);
    book_strobe(dst, ev.strobe);
    const int overlaps = medium_->audible_overlaps(sender, ev.strobe, ack_st.start_us, now_);
    const bool got_ack =
        resolve_reception(overlaps, node(sender).rng, cfg_.radio.base_loss_prob);
    if (got_ack) {
      if (!ev.locked) {
        medium_->close(ev.aux_strobe, now_);
        book_strobe(sender, ev.aux_strobe);
      }
      NodeRuntime& rt = node(sender);
      rt.phase_known[static_cast<std::size_t>(dst)] = true;
      if (rt.st.preferred_parent && dst == *rt.st.preferred_parent) {
        rt.parent_fail_streak = 0;
      }
      PendingFrame& f = rt.txq.front();
      if (f.purpose == Purpose::Probe) probe_mark(sender, f.probe_epoch, true);
      finish_frame(sender, true);
      return;
    }
    if (ev.locked) {
      node(sender).tx_busy = false;
      consume_attempt(sender);
      return;
    }
    const auto data_st = medium_->strobe(ev.aux_strobe);
    Event fe;
    fe.kind = EventKind::TX_END;
    fe.sub = TxEndSub::Fail;
    fe.target = sender;
    fe.strobe = ev.aux_strobe;
    schedule(fail_end(data_st.start_us, now_), fe);
  }

  void end_fail(const Event& ev) {
    medium_->close(ev.strobe, now_);
    book_strobe(ev.target, ev.strobe);
    node(ev.target).tx_busy = false;
    consume_attempt(ev.target);
  }

  void consume_attempt(NodeId n) {
    NodeRuntime& rt = node(n);
    PendingFrame& f = rt.txq.front();
    --f.attempts_left;
    if (f.attempts_left > 0) {
      f.csma_left = cfg_.radio.csma_max_backoffs;
      f.attempt_counted = false;
      rt.tx_start_pending = true;
      // Exponential retry backoff spreads synchronized senders apart.
      const int attempt = 1 + cfg_.radio.mac_retries - f.attempts_left;
      const int shift = std::min(attempt, 4);
      Event ev;
      ev.kind = EventKind::TX_START;
      ev.target = n;
      schedule(now_ + rt.rng.next_in(1, cfg_.radio.mac_retry_window_us() << shift), ev);
      return;
    }
    if (f.link_dst != kBroadcast) {
      rec(Rec::MacFail, n, f.link_dst, static_cast<std::int64_t>(f.pkt.kind));
    }
    // Two consecutive routed frames lost to the preferred parent after
    // all retries is the unreachability signal: the parent is marked
    // suspect. A single loss under transient contention is tolerated.
    bool parent_dead = false;
    if (rt.st.role == Role::SENSOR && rt.st.joined() && rt.st.preferred_parent &&
        f.link_dst == *rt.st.preferred_parent &&
        (f.purpose == Purpose::Data || f.purpose == Purpose::Dao)) {
      if (++rt.parent_fail_streak >= 2) {
        rt.parent_fail_streak = 0;
        parent_dead = true;
      }
    }
    if (f.purpose == Purpose::Probe) probe_mark(n, f.probe_epoch, false);
    finish_frame(n, false);
    if (parent_dead) demote_parent(n);
  }

  void finish_frame(NodeId n, bool /*success*/) {
    NodeRuntime& rt = node(n);
    rt.txq.pop_front();
    rt.tx_busy = false;
    if (!rt.txq.empty() && !rt.tx_start_pending) {
      rt.tx_start_pending = true;
      Event ev;
      ev.kind = EventKind::TX_START;
      ev.target = n;
      schedule(now_, ev);
    }
  }

  // -------------------------------------------------------- reception

  void on_rx(NodeId n, const Packet& pkt, NodeId /*link_from*/) {
    cpu_event(n);
    NodeRuntime& rt = node(n);
    if (rt.st.role == Role::ATTACKER) {
      if (pkt.kind == PacketKind::DIO && attacker_on_dio(rt.atk, pkt, SimTime::from_us(now_))) {
        rec(Rec::AttackerCapture, n, pkt.claimed_source,
            static_cast<std::int64_t>(pkt.payload_rank.value));
        ++rt.atk.replay_epoch;
        schedule_timer(n, TimerKind::ReplayFire, rt.atk.replay_interval_us,
                       rt.atk.replay_epoch);
      } else {
        rec(Rec::AttackerIgnored, n, -1, static_cast<std::int64_t>(pkt.kind));
      }
      return;
    }
    switch (pkt.kind) {
      case PacketKind::DIO: on_dio(n, pkt); break;
      case PacketKind::DIS:
        if (pkt.destination == kBroadcast) {
          if (rt.st.joined()) trickle_reset(n);
        } else if (rt.st.joined()) {
          Packet dio;
          dio.kind = PacketKind::DIO;
          dio.true_source = n;
          dio.claimed_source = n;
          dio.destination = pkt.true_source;
          dio.payload_rank = Rank{rt.st.rank};
          dio.size_bytes = kDioSizeBytes;
          dio.created_at = SimTime::from_us(now_);
          enqueue_frame(n, dio, pkt.true_source, Purpose::DioReply);
        }
        break;
      case PacketKind::DAO: on_dao(n, pkt); break;
      case PacketKind::DAO_ACK: on_dao_ack(n, pkt); break;
      case PacketKind::DATA: on_data(n, pkt); break;
      case PacketKind::PROBE:
        break;  // the MAC-level acknowledgment is the whole reply
      case PacketKind::ACK:
        break;
    }
  }

  void on_dio(NodeId n, const Packet& pkt) {
    NodeRuntime& rt = node(n);
    if (pkt.claimed_source == n) return;  // own-address frames are discarded
    if (pkt.payload_rank.value < kRootRank) {
      rec(Rec::InvalidDio, n, pkt.claimed_source);
      ++trace_.counters.invalid_dios;
      return;
    }
    rec(Rec::DioRx, n, pkt.claimed_source);
    auto [it, inserted] = rt.st.candidates.try_emplace(pkt.claimed_source);
    NeighborEntry& e = it->second;
    // A brand-new neighbor or a rank moved past the hysteresis margin is
    // a topology inconsistency; small rank wobble is not.
    const std::uint32_t adv = pkt.payload_rank.value;
    const std::uint32_t prev = e.last_rank.value;
    const std::uint32_t delta = prev > adv ? prev - adv : adv - prev;
    const bool inconsistent = inserted || delta >= kParentHysteresis;
    e.neighbor = pkt.claimed_source;
    e.last_rank = pkt.payload_rank;
    ++e.dio_count;
    if (rt.st.trickle.running) {
      if (inconsistent) {
        trickle_reset(n);
      } else {
        ++rt.st.trickle.counter;
      }
    }
    if (rt.st.role != Role::ROOT) selection_cascade(n);
  }

  void on_dao(NodeId n, const Packet& pkt) {
    NodeRuntime& rt = node(n);
    if (n == kRootId) {
      rt.st.downward_routes[pkt.true_source] = pkt.route;
      Packet ack;
      ack.kind = PacketKind::DAO_ACK;
      ack.true_source = kRootId;
      ack.claimed_source = kRootId;
      ack.destination = pkt.true_source;
      ack.size_bytes = kDaoAckSizeBytes;
      ack.created_at = SimTime::from_us(now_);
      ack.seq = pkt.seq;
      ack.route.assign(pkt.route.rbegin(), pkt.route.rend());
      if (!ack.route.empty()) {
        enqueue_frame(kRootId, ack, ack.route.front(), Purpose::DaoAck);
      }
      return;
    }
    if (!rt.st.joined()) return;  // lost; the origin's timer recovers
    Packet fwd = pkt;
    fwd.route.push_back(n);
    fwd.size_bytes = kDaoBaseSizeBytes + 2 * static_cast<int>(fwd.route.size());
    enqueue_frame(n, fwd, *rt.st.preferred_parent, Purpose::Dao);
  }

  void on_dao_ack(NodeId n, const Packet& pkt) {
    NodeRuntime& rt = node(n);
    if (pkt.destination == n) {
      if (rt.st.dao.pending && static_cast<std::uint64_t>(pkt.seq) == rt.st.dao.epoch) {
        rt.st.dao.pending = false;
        rt.st.dao.confirmed = true;
        rec(Rec::DaoConfirmed, n, -1, pkt.seq);
      }
      return;
    }
    for (std::size_t i = 0; i < pkt.route.size(); ++i) {
      if (pkt.route[i] == n) {
        if (i + 1 < pkt.route.size()) {
          enqueue_frame(n, pkt, pkt.route[i + 1], Purpose::DaoAck);
        }
        return;
      }
    }
  }

  void on_data(NodeId n, const Packet& pkt) {
    NodeRuntime& rt = node(n);
    const std::uint64_t key = data_key(pkt.true_source, pkt.seq);
    if (n == kRootId) {
      if (rt.seen_data.insert(key).second) {
        rec(Rec::DataDelivered, pkt.true_source, -1, pkt.seq, pkt.created_at.us);
        ++trace_.counters.delivered;
        trace_.counters.delay_sum_us += now_ - pkt.created_at.us;
      }
      return;
    }
    if (!rt.seen_data.insert(key).second) return;  // duplicate from a MAC retry
    if (rt.st.joined()) {
      enqueue_frame(n, pkt, *rt.st.preferred_parent, Purpose::Data);
    } else {
      rec(Rec::DataNoRoute, n, -1, pkt.seq);
      ++trace_.counters.no_route_drops;
    }
  }

  // ----------------------------------------------------------- timers

  void on_timer(const Event& ev) {
    switch (ev.timer) {
      case TimerKind::TrickleFire: on_trickle_fire(ev.target, ev.epoch); break;
      case TimerKind::DisSolicit: on_dis_solicit(ev.target, ev.epoch); break;
      case TimerKind::ProbeStep: on_probe_step(ev.target, ev.epoch); break;
      case TimerKind::DaoTimeout: on_dao_timeout(ev.target, ev.epoch); break;
      case TimerKind::ReplayFire: on_replay_fire(ev.target, ev.epoch); break;
      case TimerKind::ParentProbe: on_parent_probe(ev.target); break;
    }
  }

  // Periodic link supervision: refresh the preferred parent's ETX with
  // a fresh probe round.
  void on_parent_probe(NodeId n) {
    NodeRuntime& rt = node(n);
    if (rt.st.role != Role::SENSOR) return;
    if (rt.st.joined() && !rt.st.probe &&
        rt.st.candidates.count(*rt.st.preferred_parent) > 0) {
      rt.st.probe = ProbeRound{*rt.st.preferred_parent, 0, 0, 0, 0, ++rt.st.probe_epoch};
      schedule_timer(n, TimerKind::ProbeStep, 0, rt.st.probe->epoch);
    }
    schedule_timer(n, TimerKind::ParentProbe,
                   kParentProbeIntervalUs + rt.rng.next_in(0, kParentProbeJitterUs), 0);
  }

  void check_trickle_bounds(const TrickleState& t) {
    if (t.interval_us < t.imin_us || t.interval_us > t.imax_us) {
      ++trace_.counters.trickle_bound_violations;
    }
  }

  void trickle_reset(NodeId n) {
    NodeRuntime& rt = node(n);
    rt.st.trickle.reset(now_, rt.rng);
    check_trickle_bounds(rt.st.trickle);
    schedule_timer(n, TimerKind::TrickleFire, rt.st.trickle.fire_at_us - now_,
                   rt.st.trickle.epoch);
  }

  void on_trickle_fire(NodeId n, std::uint64_t epoch) {
    NodeRuntime& rt = node(n);
    if (!rt.st.trickle.running || rt.st.trickle.epoch != epoch) return;
    cpu_event(n);
    const std::int64_t interval_before = rt.st.trickle.interval_us;
    const bool transmit = rt.st.trickle.on_fire(now_, rt.rng);
    check_trickle_bounds(rt.st.trickle);
    schedule_timer(n, TimerKind::TrickleFire, rt.st.trickle.fire_at_us - now_,
                   rt.st.trickle.epoch);
    if (transmit && rt.st.joined()) {
      Packet dio;
      dio.kind = PacketKind::DIO;
      dio.true_source = n;
      dio.claimed_source = n;
      dio.destination = kBroadcast;
      dio.payload_rank = Rank{rt.st.rank};
      dio.size_bytes = kDioSizeBytes;
      dio.created_at = SimTime::from_us(now_);
      rec(Rec::TrickleTx, n, -1, interval_before);
      enqueue_frame(n, dio, kBroadcast, Purpose::DioTrickle);
    } else if (!transmit) {
      rec(Rec::TrickleSuppressed, n, -1, rt.st.trickle.counter);
    }
  }

  void on_dis_solicit(NodeId n, std::uint64_t epoch) {
    NodeRuntime& rt = node(n);
    if (rt.st.dis_epoch != epoch || rt.st.joined()) return;
    Packet dis;
    dis.kind = PacketKind::DIS;
    dis.true_source = n;
    dis.claimed_source = n;
    dis.destination = kBroadcast;
    dis.size_bytes = kDisSizeBytes;
    dis.created_at = SimTime::from_us(now_);
    rec(Rec::DisTx, n);
    enqueue_frame(n, dis, kBroadcast, Purpose::Dis);
    schedule_timer(n, TimerKind::DisSolicit, kDisPeriodUs, epoch);
  }

  void on_probe_step(NodeId n, std::uint64_t epoch) {
    NodeRuntime& rt = node(n);
    if (!rt.st.probe || rt.st.probe->epoch != epoch) return;
    if (rt.st.probe->sent >= kProbeCount) return;
    ++rt.st.probe->sent;
    Packet p;
    p.kind = PacketKind::PROBE;
    p.true_source = n;
    p.claimed_source = n;
    p.destination = rt.st.probe->candidate;
    p.size_bytes = kProbeSizeBytes;
    p.created_at = SimTime::from_us(now_);
    enqueue_frame(n, p, rt.st.probe->candidate, Purpose::Probe, epoch);
    if (rt.st.probe->sent < kProbeCount) {
      schedule_timer(n, TimerKind::ProbeStep, kProbeSpacingUs, epoch);
    }
  }

  void probe_mark(NodeId n, std::uint64_t epoch, bool acked) {
    NodeRuntime& rt = node(n);
    if (!rt.st.probe || rt.st.probe->epoch != epoch) return;
    ++rt.st.probe->resolved;
    if (acked) ++rt.st.probe->acked;
    if (rt.st.probe->resolved < kProbeCount) return;
    const NodeId cand = rt.st.probe->candidate;
    const int acks = rt.st.probe->acked;
    const int tx = rt.st.probe->transmissions;
    rt.st.probe.reset();
    auto it = rt.st.candidates.find(cand);
    if (it != rt.st.candidates.end()) {
      if (acks >= 1) {
        it->second.etx = probe_round_etx(
            tx, acks, it->second.probe_verified ? it->second.etx : 0.0);
        it->second.probe_verified = true;
        rec(Rec::ProbeVerified, n, cand,
            static_cast<std::int64_t>(it->second.etx * 1000.0 + 0.5));
      } else {
        // No acknowledgment came back: the path is assumed bad and the
        // candidate is dropped from the table.
        rt.st.candidates.erase(it);
        rec(Rec::ProbeDiscarded, n, cand);
      }
    }
    selection_cascade(n);
  }

  void on_dao_timeout(NodeId n, std::uint64_t epoch) {
    NodeRuntime& rt = node(n);
    if (rt.st.dao.epoch != epoch || !rt.st.dao.pending) return;
    if (!rt.st.joined()) {
      rt.st.dao.pending = false;
      return;
    }
    if (rt.st.dao.retries_left > 0) {
      --rt.st.dao.retries_left;
      emit_dao(n);
      schedule_timer(n, TimerKind::DaoTimeout, kDaoTimeoutUs, epoch);
      return;
    }
    rt.st.dao.pending = false;
    demote_parent(n);
  }

  void on_replay_fire(NodeId n, std::uint64_t epoch) {
    NodeRuntime& rt = node(n);
    if (rt.atk.replay_epoch != epoch || !rt.atk.captured_dio) return;
    rec(Rec::ReplayFire, n);
    Packet p = attacker_replay_packet(rt.atk, n);
    enqueue_frame(n, p, kBroadcast, Purpose::DioReplay);
    schedule_timer(n, TimerKind::ReplayFire, rt.atk.replay_interval_us, epoch);
  }

  // ------------------------------------------------------ DAO machinery

  void emit_dao(NodeId n) {
    NodeRuntime& rt = node(n);
    Packet dao;
    dao.kind = PacketKind::DAO;
    dao.true_source = n;
    dao.claimed_source = n;
    dao.destination = kRootId;
    dao.size_bytes = kDaoBaseSizeBytes + 2;
    dao.created_at = SimTime::from_us(now_);
    dao.seq = static_cast<std::int64_t>(rt.st.dao.epoch);
    dao.route = {n};
    rec(Rec::DaoSent, n, -1, dao.seq);
    enqueue_frame(n, dao, *rt.st.preferred_parent, Purpose::Dao);
  }

  void send_dao(NodeId n) {
    NodeRuntime& rt = node(n);
    if (rt.st.role != Role::SENSOR || !rt.st.joined()) return;
    ++rt.st.dao.epoch;
    rt.st.dao.pending = true;
    rt.st.dao.confirmed = false;
    rt.st.dao.retries_left = kDaoRetries;
    emit_dao(n);
    schedule_timer(n, TimerKind::DaoTimeout, kDaoTimeoutUs, rt.st.dao.epoch);
  }

  void demote_parent(NodeId n) {
    NodeRuntime& rt = node(n);
    if (!rt.st.preferred_parent) return;
    const NodeId pp = *rt.st.preferred_parent;
    rec(Rec::ParentDemoted, n, pp);
    auto it = rt.st.candidates.find(pp);
    if (it != rt.st.candidates.end()) {
      if (rt.st.of == ObjFunc::MRHOF) {
        it->second.probe_verified = false;
      } else {
        rt.st.candidates.erase(it);
      }
    }
    selection_cascade(n);
  }

  // ----------------------------------------------- parent selection

  LiveParentInfo live_view(NodeId cid) const {
    if (cid < 0 || cid >= static_cast<NodeId>(nodes_.size())) return {};
    const NodeRuntime& rt = nodes_[static_cast<std::size_t>(cid)];
    if (rt.st.role == Role::ATTACKER) {
      // An attacker advertises whatever it replays and nothing else is
      // knowable about it; selection must take the claim at face value.
      return {true, kInfiniteRank, true};
    }
    return {rt.st.joined(), rt.st.rank, false};
  }

  double parent_etx(const NodeState& st, NodeId parent) const {
    auto it = st.candidates.find(parent);
    if (it == st.candidates.end() || it->second.etx < 1.0) return 1.0;
    return it->second.etx;
  }

  void selection_cascade(NodeId start) {
    std::deque<NodeId> wl{start};
    int guard = 100000;
    while (!wl.empty()) {
      if (--guard < 0) {
        ++trace_.counters.worklist_overflows;
        break;
      }
      const NodeId n = wl.front();
      wl.pop_front();
      NodeRuntime& rt = node(n);
      if (rt.st.role != Role::SENSOR) continue;
      const SelectionResult res =
          select_preferred_parent(rt.st, [this](NodeId c) { return live_view(c); });
      if (!res.probe_wanted.empty() && rt.st.of == ObjFunc::MRHOF && !rt.st.probe) {
        // Probe the most promising unverified candidate.
        NodeId best = res.probe_wanted.front();
        std::uint32_t best_rank = rt.st.candidates.at(best).last_rank.value;
        for (NodeId c : res.probe_wanted) {
          const std::uint32_t r = rt.st.candidates.at(c).last_rank.value;
          if (r < best_rank || (r == best_rank && c < best)) {
            best = c;
            best_rank = r;
          }
        }
        rt.st.probe = ProbeRound{best, 0, 0, 0, 0, ++rt.st.probe_epoch};
        schedule_timer(n, TimerKind::ProbeStep, 0, rt.st.probe->epoch);
      }
      if (res.detached) {
        if (rt.st.joined()) detach_node(n, wl);
        continue;
      }
      if (res.changed) {
        rt.st.rank = res.new_rank;
        rt.st.preferred_parent = res.parent;
        const bool beyond = !medium_->in_comm(n, *res.parent);
        rec(Rec::ParentChange, n, *res.parent,
            static_cast<std::int64_t>(res.new_rank), beyond ? 1 : 0);
        if (beyond) {
          if (rt.st.of == ObjFunc::MRHOF) {
            ++trace_.counters.mrhof_range_violations;
          } else {
            ++trace_.counters.of0_out_of_range_adoptions;
          }
        }
        trickle_reset(n);
        send_dao(n);
        push_children(n, wl);
      } else if (res.rank_refreshed) {
        const std::uint32_t old = rt.st.rank;
        rt.st.rank = res.new_rank;
        // A significant own-rank move is a topology inconsistency the
        // node must advertise promptly.
        const std::uint32_t d =
            old > res.new_rank ? old - res.new_rank : res.new_rank - old;
        if (old != kInfiniteRank && d >= kParentHysteresis) trickle_reset(n);
        push_children(n, wl);
      }
    }
    verify_tree_invariants();
  }

  // Re-derive the ranks of every node whose preferred parent is x, from
  // x's current rank. This settles rank changes through the subtree
  // within the same event, standing in for the poisoning / repair DIOs
  // a real network would exchange over the following seconds.
  void push_children(NodeId x, std::deque<NodeId>& wl) {
    for (auto& crt : nodes_) {
      if (crt.st.role != Role::SENSOR) continue;
      if (!crt.st.preferred_parent || *crt.st.preferred_parent != x) continue;
      const NodeId c = crt.st.id;
      const std::uint32_t parent_rank = node(x).st.rank;
      if (!node(x).st.joined() || parent_rank == kInfiniteRank) {
        detach_node(c, wl);
        continue;
      }
      const std::uint32_t nr =
          compute_rank(crt.st.of, parent_rank, parent_etx(crt.st, x));
      if (nr == kInfiniteRank) {
        detach_node(c, wl);
        continue;
      }
      if (nr != crt.st.rank) {
        const std::uint32_t old = crt.st.rank;
        crt.st.rank = nr;
        const std::uint32_t d = old > nr ? old - nr : nr - old;
        if (old != kInfiniteRank && d >= kParentHysteresis) trickle_reset(c);
        push_children(c, wl);
      }
      wl.push_back(c);
    }
  }

  void detach_node(NodeId n, std::deque<NodeId>& wl) {
    NodeRuntime& rt = node(n);
    rt.st.rank = kInfiniteRank;
    rt.st.preferred_parent.reset();
    rt.st.trickle.stop();
    rt.st.dao.pending = false;
    rec(Rec::Detach, n);
    ++rt.st.dis_epoch;
    schedule_timer(n, TimerKind::DisSolicit, kDisPeriodUs, rt.st.dis_epoch);
    for (auto& crt : nodes_) {
      if (crt.st.role != Role::SENSOR) continue;
      if (crt.st.preferred_parent && *crt.st.preferred_parent == n) {
        detach_node(crt.st.id, wl);
      }
    }
    wl.push_back(n);  // it may rejoin through another verified candidate
  }

  void verify_tree_invariants() {
    const std::size_t n = nodes_.size();
    for (std::size_t i = 1; i < n; ++i) {
      const NodeState& st = nodes_[i].st;
      if (st.role != Role::SENSOR || !st.joined()) continue;
      const NodeState& pst = node(*st.preferred_parent).st;
      if (!pst.joined() || st.rank <= pst.rank) {
        ++trace_.counters.rank_rule_violations;
      }
      // The parent chain must reach the root within n hops.
      NodeId cur = st.id;
      bool ok = false;
      for (std::size_t hop = 0; hop <= n; ++hop) {
        if (cur == kRootId) {
          ok = true;
          break;
        }
        const NodeState& cst = node(cur).st;
        if (!cst.preferred_parent) break;
        cur = *cst.preferred_parent;
      }
      if (!ok) ++trace_.counters.chain_violations;
    }
  }

  // --------------------------------------------------------- finalize

  void finalize() {
    const std::int64_t end = cfg_.sim_end_us();
    close_open_strobes(end);
    build_energy(end);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      trace_.nodes[i].final_rank = nodes_[i].st.rank;
      trace_.nodes[i].final_parent =
          nodes_[i].st.preferred_parent ? *nodes_[i].st.preferred_parent : -1;
    }
    trace_.root_routes = nodes_[0].st.downward_routes;
  }

  void close_open_strobes(std::int64_t end) {
    // Any strobe without a TX_END before the horizon ends with the run.
    for (auto& rt : nodes_) rt.tx_busy = false;
    medium_->close_all_open(end, [this](NodeId sender, int idx) { book_strobe(sender, idx); });
  }

  void build_energy(std::int64_t end) {
    const std::int64_t bin = trace_.energy_bin_us;
    const std::int64_t wake = cfg_.radio.wake_us();
    const std::int64_t check = cfg_.radio.check_us();
    trace_.ledgers.assign(nodes_.size(), EnergyLedger{});
    if (end <= 0) return;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      NodeRuntime& rt = nodes_[i];
      EnergyLedger& ledger = trace_.ledgers[i];
      std::size_t cpu_cursor = 0;
      std::sort(rt.cpu_times.begin(), rt.cpu_times.end());
      for (std::int64_t b0 = 0; b0 < end; b0 += bin) {
        const std::int64_t b1 = std::min(b0 + bin, end);
        std::vector<TimeSpan> tx, aud;
        clip_spans(rt.tx_spans, b0, b1, tx);
        clip_spans(rt.audible_spans, b0, b1, aud);
        append_check_spans(rt.phase_us, wake, check, b0, b1, aud);
        merge_union(tx);
        merge_union(aud);
        const std::int64_t tx_us = total_length(tx);
        const std::int64_t rx_us = total_length(aud) - intersect_length(aud, tx);
        std::int64_t cpu_us = 0;
        while (cpu_cursor < rt.cpu_times.size() && rt.cpu_times[cpu_cursor] < b1) {
          cpu_us += kCpuEventUs;
          ++cpu_cursor;
        }
        std::int64_t lpm_us = (b1 - b0) - tx_us - rx_us - cpu_us;
        if (lpm_us < 0) {
          ++trace_.counters.energy_partition_violations;
          lpm_us = 0;
        }
        ledger.tx_us += tx_us;
        ledger.rx_us += rx_us;
        ledger.cpu_us += cpu_us;
        ledger.lpm_us += lpm_us;
        const double span_s = static_cast<double>(b1 - b0) * 1e-6;
        NodeBinPower row;
        row.node = static_cast<NodeId>(i);
        row.bin_start_us = b0;
        row.cpu_mw = 1000.0 * cfg_.profile.volts * cfg_.profile.i_cpu_a *
                     (static_cast<double>(cpu_us) * 1e-6) / span_s;
        row.lpm_mw = 1000.0 * cfg_.profile.volts * cfg_.profile.i_lpm_a *
                     (static_cast<double>(lpm_us) * 1e-6) / span_s;
        row.tx_mw = 1000.0 * cfg_.profile.volts * cfg_.profile.i_tx_a *
                    (static_cast<double>(tx_us) * 1e-6) / span_s;
        row.rx_mw = 1000.0 * cfg_.profile.volts * cfg_.profile.i_rx_a *
                    (static_cast<double>(rx_us) * 1e-6) / span_s;
        trace_.per_node_series.push_back(row);
      }
      if (ledger.total_us() != end) ++trace_.counters.energy_partition_violations;
    }
  }

  static void clip_spans(const std::vector<TimeSpan>& in, std::int64_t lo, std::int64_t hi,
                         std::vector<TimeSpan>& out) {
    for (const auto& sp : in) {
      const std::int64_t s = std::max(sp.s, lo);
      const std::int64_t e = std::min(sp.e, hi);
      if (e > s) out.push_back({s, e});
    }
  }

  // ------------------------------------------------------------ state

  ScenarioConfig cfg_;
  RngStream topo_rng_;
  std::vector<Position> positions_;
  std::optional<Medium> medium_;
  std::vector<NodeRuntime> nodes_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  std::int64_t now_ = 0;
  Trace trace_;
};

// Execute one scenario and return its full trace.
inline Trace run(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

// ---------------------------------------------------------- replicate

struct ReplicationSummary {
  std::vector<MetricsReport> reports;  // one per seed, in seed order
  SampleStats pdr;
  SampleStats app_pdr;
  SampleStats ae2ed_s;
  SampleStats apc_mw;
};

// Run `replications` independent simulations with seeds seed, seed+1,
// ... and summarize with mean and 95% Student-t half-widths.
inline ReplicationSummary replicate(const ScenarioConfig& cfg, int threads = 1) {
  if (cfg.replications < 1) {
    throw std::invalid_argument("replicate: replications must be >= 1");
  }
  const int n = cfg.replications;
  ReplicationSummary out;
  out.reports.resize(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  const int nthreads = std::max(1, std::min(threads, n));
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w]() {
      for (int r = w; r < n; r += nthreads) {
        ScenarioConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(r);
        Trace tr = run(c);
        out.reports[static_cast<std::size_t>(r)] = metrics_from_trace(tr);
      }
    });
  }
  for (auto& th : pool) th.join();
  std::vector<double> pdr, app, ae2, apc;
  for (const auto& rep : out.reports) {
    if (rep.pdr) pdr.push_back(*rep.pdr);
    if (rep.app_pdr) app.push_back(*rep.app_pdr);
    if (rep.ae2ed_s) ae2.push_back(*rep.ae2ed_s);
    apc.push_back(rep.apc_mw);
  }
  out.pdr = sample_stats(pdr);
  out.app_pdr = sample_stats(app);
  out.ae2ed_s = sample_stats(ae2);
  out.apc_mw = sample_stats(apc);
  return out;
}

}  // namespace rplsim

#endif  // RPLSIM_ENGINE_HPP
