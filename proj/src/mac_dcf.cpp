#include "vanetsim/mac_dcf.hpp"

#include <algorithm>

namespace vanetsim {

int next_contention_window(int cw, const MacTimings& t) { return std::min(2 * (cw + 1) - 1, t.cw_max); }

std::string_view to_string(DcfPhase p) {
  switch (p) {
    case DcfPhase::Idle: return "IDLE";
    case DcfPhase::WaitDifs: return "WAIT_DIFS";
    case DcfPhase::Backoff: return "BACKOFF";
    case DcfPhase::Tx: return "TX";
    case DcfPhase::WaitCts: return "WAIT_CTS";
    case DcfPhase::WaitAck: return "WAIT_ACK";
    case DcfPhase::DeferNav: return "DEFER_NAV";
  }
  return "?";
}

Dcf::Dcf(NodeId self, Scheduler& sched, Channel& channel, MacTimings timings, RngStream backoff_rng,
         MacUpper* upper)
    : self_(self), sched_(sched), channel_(channel), t_(timings), rng_(backoff_rng), upper_(upper),
      cw_(timings.cw_min) {
  channel_.attach(self_, this);
}

SimTime Dcf::frame_air(std::uint32_t bytes) const {
  return airtime(static_cast<std::uint64_t>(bytes) * 8, channel_.params());
}

SimTime Dcf::rts_duration(std::uint32_t payload_bytes) const {
  return t_.sifs * 3 + frame_air(t_.cts_bytes) + frame_air(t_.data_header_bytes + payload_bytes) +
         frame_air(t_.ack_bytes);
}

DcfPhase Dcf::phase() const {
  switch (exchange_) {
    case Exchange::None: return DcfPhase::Idle;
    case Exchange::TxBroadcast:
    case Exchange::TxRts:
    case Exchange::TxData:
    case Exchange::SifsData: return DcfPhase::Tx;
    case Exchange::WaitCts: return DcfPhase::WaitCts;
    case Exchange::WaitAck: return DcfPhase::WaitAck;
    case Exchange::Contending: break;
  }
  const SimTime now = sched_.now();
  if (!medium_idle_) {
    const bool phys = channel_.carrier_busy(self_) || channel_.transmitting(self_);
    return (!phys && nav_until_ > now) ? DcfPhase::DeferNav : DcfPhase::Backoff;
  }
  return now < idle_ref_ + t_.difs ? DcfPhase::WaitDifs : DcfPhase::Backoff;
}

bool Dcf::medium_idle_now() const {
  return !channel_.carrier_busy(self_) && !channel_.transmitting(self_) && nav_until_ <= sched_.now();
}

void Dcf::medium_changed() {
  const bool idle = medium_idle_now();
  if (idle == medium_idle_) return;
  medium_idle_ = idle;
  if (idle) {
    on_idle();
  } else {
    on_busy();
  }
}

int Dcf::remaining_slots(SimTime t) const {
  const SimTime start = idle_ref_ + t_.difs;
  if (t <= start) return backoff_slots_;
  const auto consumed = static_cast<int>((t - start).us() / t_.slot.us());
  return std::max(0, backoff_slots_ - consumed);
}

int Dcf::draw_backoff() {
  if (forced_backoff_) {
    const int slots = *forced_backoff_;
    forced_backoff_.reset();
    return slots;
  }
  return static_cast<int>(rng_.uniform_int(0, cw_));
}

void Dcf::begin_backoff(int slots) {
  // The countdown of a fresh backoff starts no earlier than now.
  if (medium_idle_now() && sched_.now() - idle_ref_ > t_.difs) idle_ref_ = sched_.now() - t_.difs;
  backoff_slots_ = slots;
}

void Dcf::on_busy() {
  const SimTime now = sched_.now();
  backoff_slots_ = remaining_slots(now);
  if (access_timer_ == kNoTicket) return;
  if (access_at_ == now) return;  // same-slot start elsewhere; we transmit too and collide
  sched_.cancel(access_timer_);
  access_timer_ = kNoTicket;
  // Medium went busy during the DIFS wait of a zero-backoff access: defer
  // and contend properly.
  if (backoff_slots_ == 0) backoff_slots_ = draw_backoff();
}

void Dcf::on_idle() {
  idle_ref_ = sched_.now();
  had_busy_ = true;
  if (exchange_ == Exchange::Contending) schedule_access();
}

void Dcf::schedule_access() {
  if (access_timer_ != kNoTicket) return;
  const SimTime now = sched_.now();
  const SimTime at = std::max(now, idle_ref_ + t_.difs + t_.slot * backoff_slots_);
  access_at_ = at;
  access_timer_ = sched_.schedule(at, self_, EventKind::TimerExpiry, [this] {
    access_timer_ = kNoTicket;
    access_granted();
  });
}

bool Dcf::enqueue(std::shared_ptr<const NetPacket> packet, NodeId next_hop) {
  if (dead_ || held() >= t_.queue_limit) {
    ++counters_.queue_drops;
    return false;
  }
  ++counters_.mac_packets_from_network;
  queue_.push_back(Pending{std::move(packet), next_hop, next_mac_seq_++});
  next_frame();
  return true;
}

void Dcf::next_frame() {
  if (current_ || queue_.empty() || dead_) return;
  current_ = std::move(queue_.front());
  queue_.pop_front();
  retry_ = 0;
  start_contention();
}

void Dcf::start_contention() {
  exchange_ = Exchange::Contending;
  const SimTime now = sched_.now();
  if (!medium_idle_now() || !medium_idle_) {
    if (backoff_slots_ == 0) backoff_slots_ = draw_backoff();
    return;  // on_idle() schedules access
  }
  backoff_slots_ = remaining_slots(now);
  if (backoff_slots_ == 0 && had_busy_ && now < idle_ref_ + t_.difs) backoff_slots_ = draw_backoff();
  schedule_access();
}

MacFrame Dcf::make_data(const Pending& p) const {
  MacFrame f;
  f.kind = FrameKind::Data;
  f.src = self_;
  f.dst = p.next_hop;
  f.header_bytes = t_.data_header_bytes;
  f.payload = p.packet;
  f.payload_bytes = p.packet->wire_bytes();
  f.mac_seq = p.mac_seq;
  f.retry = retry_ > 0;
  f.duration = p.next_hop == kBroadcast ? SimTime{} : t_.sifs + frame_air(t_.ack_bytes);
  return f;
}

void Dcf::access_granted() {
  if (!current_ || dead_) return;
  backoff_slots_ = 0;
  const Pending& p = *current_;
  MacFrame frame;
  if (p.next_hop == kBroadcast) {
    frame = make_data(p);
    exchange_ = Exchange::TxBroadcast;
    ++counters_.dcf_broadcasts_sent;
  } else if (p.packet->wire_bytes() >= t_.rts_threshold_bytes) {
    frame.kind = FrameKind::Rts;
    frame.src = self_;
    frame.dst = p.next_hop;
    frame.header_bytes = t_.rts_bytes;
    frame.duration = rts_duration(p.packet->wire_bytes());
    frame.retry = retry_ > 0;
    exchange_ = Exchange::TxRts;
    ++counters_.unicast_attempts;
    ++counters_.rts_sent;
  } else {
    frame = make_data(p);
    exchange_ = Exchange::TxData;
    ++counters_.unicast_attempts;
    ++counters_.data_unicast_sent;
  }
  if (attempt_hook_) attempt_hook_(frame, cw_, retry_);
  channel_.transmit(self_, std::move(frame));
  medium_changed();
}

void Dcf::on_transmit_end() {
  medium_changed();
  const SimTime now = sched_.now();
  switch (exchange_) {
    case Exchange::TxBroadcast:
      cw_ = t_.cw_min;
      begin_backoff(draw_backoff());
      finish_current();
      break;
    case Exchange::TxRts:
      exchange_ = Exchange::WaitCts;
      timeout_timer_ = sched_.schedule(now + t_.sifs + frame_air(t_.cts_bytes) + t_.slot, self_,
                                       EventKind::TimerExpiry, [this] {
                                         timeout_timer_ = kNoTicket;
                                         on_timeout();
                                       });
      break;
    case Exchange::TxData:
      exchange_ = Exchange::WaitAck;
      timeout_timer_ = sched_.schedule(now + t_.sifs + frame_air(t_.ack_bytes) + t_.slot, self_,
                                       EventKind::TimerExpiry, [this] {
                                         timeout_timer_ = kNoTicket;
                                         on_timeout();
                                       });
      break;
    default:
      break;  // end of a CTS/ACK response
  }
}

void Dcf::finish_current() {
  current_.reset();
  exchange_ = Exchange::None;
  next_frame();
}

void Dcf::on_timeout() {
  if (exchange_ != Exchange::WaitCts && exchange_ != Exchange::WaitAck) return;
  ++retry_;
  if (retry_ > t_.retry_limit) {
    ++counters_.mac_unicast_drops;
    Pending failed = std::move(*current_);
    cw_ = t_.cw_min;
    retry_ = 0;
    begin_backoff(draw_backoff());
    current_.reset();
    exchange_ = Exchange::None;
    if (upper_) upper_->mac_unicast_failed(failed.packet, failed.next_hop);
    next_frame();
    return;
  }
  cw_ = next_contention_window(cw_, t_);
  begin_backoff(draw_backoff());
  exchange_ = Exchange::Contending;
  if (medium_idle_) schedule_access();
}

void Dcf::extend_nav(SimTime until) {
  if (until <= nav_until_) return;
  nav_until_ = until;
  if (nav_timer_ != kNoTicket) sched_.cancel(nav_timer_);
  nav_timer_ = sched_.schedule(until, self_, EventKind::TimerExpiry, [this] {
    nav_timer_ = kNoTicket;
    medium_changed();
  });
  medium_changed();
}

void Dcf::send_response(MacFrame frame) {
  sched_.schedule_in(t_.sifs, self_, EventKind::TimerExpiry, [this, frame = std::move(frame)]() mutable {
    if (dead_ || channel_.transmitting(self_) || !channel_.enabled(self_)) return;
    if (frame.kind == FrameKind::Cts) ++counters_.cts_sent;
    if (frame.kind == FrameKind::Ack) ++counters_.ack_sent;
    channel_.transmit(self_, std::move(frame));
    medium_changed();
  });
}

void Dcf::on_reception_end(const MacFrame& frame, bool errored) {
  if (errored) {
    ++counters_.signals_received_with_errors;
    return;
  }
  ++counters_.signals_received_without_errors;
  if (dead_) return;
  const SimTime now = sched_.now();

  switch (frame.kind) {
    case FrameKind::Rts:
      if (frame.dst != self_) {
        extend_nav(now + frame.duration);
      } else if ((exchange_ == Exchange::None || exchange_ == Exchange::Contending) && nav_until_ <= now) {
        MacFrame cts;
        cts.kind = FrameKind::Cts;
        cts.src = self_;
        cts.dst = frame.src;
        cts.header_bytes = t_.cts_bytes;
        cts.duration = frame.duration - t_.sifs - frame_air(t_.cts_bytes);
        send_response(std::move(cts));
      }
      break;

    case FrameKind::Cts:
      if (frame.dst != self_) {
        extend_nav(now + frame.duration);
      } else if (exchange_ == Exchange::WaitCts && current_ && frame.src == current_->next_hop) {
        sched_.cancel(timeout_timer_);
        timeout_timer_ = kNoTicket;
        exchange_ = Exchange::SifsData;
        sched_.schedule_in(t_.sifs, self_, EventKind::TimerExpiry, [this] {
          if (exchange_ != Exchange::SifsData || !current_ || dead_) return;
          exchange_ = Exchange::TxData;
          ++counters_.data_unicast_sent;
          channel_.transmit(self_, make_data(*current_));
          medium_changed();
        });
      }
      break;

    case FrameKind::Data:
      if (frame.dst == kBroadcast) {
        ++counters_.dcf_broadcasts_received;
        if (upper_ && frame.payload) upper_->mac_deliver(frame.payload, frame.src);
      } else if (frame.dst == self_) {
        MacFrame ack;
        ack.kind = FrameKind::Ack;
        ack.src = self_;
        ack.dst = frame.src;
        ack.header_bytes = t_.ack_bytes;
        send_response(std::move(ack));
        auto [it, fresh] = last_rx_seq_.try_emplace(frame.src, frame.mac_seq);
        if (!fresh) {
          if (frame.retry && it->second == frame.mac_seq) {
            ++counters_.duplicates_suppressed;
            break;
          }
          it->second = frame.mac_seq;
        }
        if (upper_ && frame.payload) upper_->mac_deliver(frame.payload, frame.src);
      }
      break;

    case FrameKind::Ack:
      if (frame.dst == self_ && exchange_ == Exchange::WaitAck && current_ && frame.src == current_->next_hop) {
        sched_.cancel(timeout_timer_);
        timeout_timer_ = kNoTicket;
        ++counters_.unicast_success;
        cw_ = t_.cw_min;
        retry_ = 0;
        begin_backoff(draw_backoff());
        finish_current();
      }
      break;
  }
}

void Dcf::shutdown() {
  dead_ = true;
  queue_.clear();
  current_.reset();
  exchange_ = Exchange::None;
  for (Ticket* t : {&access_timer_, &timeout_timer_}) {
    if (*t != kNoTicket) sched_.cancel(*t);
    *t = kNoTicket;
  }
}

}  // namespace vanetsim
