#include "ccsim/endpoint.hpp"

#include <algorithm>

namespace ccsim {

TcpSender::TcpSender(EventLoop& loop, int flow_id, CcaMode mode, TcpConfig cfg,
                     std::function<void(Packet)> emit)
    : loop_(loop),
      flow_id_(flow_id),
      mode_(mode),
      cfg_(cfg),
      emit_(std::move(emit)),
      flow_(make_flow_state(cfg)),
      sampler_(cfg.throughput_window) {}

void TcpSender::start(VirtualTime at) {
    loop_.schedule(at, [this] {
        if (controller_) controller_->on_start(*this);
        try_send();
        arm_rto_timer();
    });
}

void TcpSender::try_send() {
    while (flight_bytes() + cfg_.mss <= flow_.cwnd) {
        // Below the high-water mark we are resending data already sent once
        // (go-back-N after a timeout); those packets are Karn-excluded.
        bool resend = snd_nxt_ < retransmit_high_water_;
        emit_(make_data_packet(flow_id_, snd_nxt_, cfg_.mss, loop_.now(), resend));
        snd_nxt_ += cfg_.mss;
        bytes_sent_ += cfg_.mss;
        ++packets_sent_;
        if (resend) {
            ++retransmit_total_;
            ++flow_.retransmit_count_window;
        }
    }
    if (!rto_timer_armed_ && flight_bytes() > 0) arm_rto_timer();
}

void TcpSender::retransmit_hole() {
    emit_(make_data_packet(flow_id_, snd_una_, cfg_.mss, loop_.now(), true));
    ++packets_sent_;
    bytes_sent_ += cfg_.mss;
    ++retransmit_total_;
    ++flow_.retransmit_count_window;
    note_loss_detected();
}

void TcpSender::note_loss_detected() {
    if (!first_loss_rtt_ && sampler_.has_rtt()) first_loss_rtt_ = sampler_.latest_rtt();
}

PathSample TcpSender::sample_path() {
    PathSample ps = sampler_.sample(loop_.now(), flow_);
    ring_.push_front(ps);
    if (ring_.size() > ring_capacity_) ring_.pop_back();
    return ps;
}

void TcpSender::arm_rto_timer() {
    uint64_t gen = ++rto_timer_gen_;
    rto_timer_armed_ = true;
    loop_.schedule_in(flow_.rto, [this, gen] {
        if (gen != rto_timer_gen_) return;  // superseded by a later re-arm
        rto_timer_armed_ = false;
        handle_rto();
    });
}

void TcpSender::handle_rto() {
    if (flight_bytes() == 0) return;
    on_rto(flow_, cfg_, flight_bytes());
    flow_.recover = snd_nxt_;
    note_loss_detected();
    // Go-back-N: everything outstanding is presumed lost and will be resent
    // from snd_una; the receiver's out-of-order buffer absorbs duplicates.
    retransmit_high_water_ = std::max(retransmit_high_water_, snd_nxt_);
    snd_nxt_ = snd_una_;
    try_send();
    arm_rto_timer();
}

void TcpSender::on_ack_packet(const Packet& ack) {
    ++acks_received_;
    VirtualTime now = loop_.now();

    // Karn's rule: retransmitted segments never produce RTT samples.
    if (!ack.echo_retransmitted) {
        VirtualTime rtt = now - ack.echo_send_time;
        on_rtt_sample(flow_, cfg_, rtt);
        sampler_.on_rtt(rtt);
        if (on_rtt_observed) on_rtt_observed(now, rtt, sampler_.throughput_bps(now));
    }

    bool advanced = ack.ack_bytes > snd_una_;
    if (advanced) {
        int64_t acked = ack.ack_bytes - snd_una_;
        snd_una_ = ack.ack_bytes;
        if (snd_nxt_ < snd_una_) snd_nxt_ = snd_una_;  // stale rewind overtaken by old data
        flow_.highest_acked = snd_una_;
        sampler_.on_acked_bytes(now, acked);

        bool policy_recovery =
            (mode_ == CcaMode::TcpLlmG || mode_ == CcaMode::TcpLlmGAggressive ||
             mode_ == CcaMode::HeuristicCc) &&
            snd_una_ < flow_.recover;

        bool ca_growth = mode_ != CcaMode::HeuristicCc;
        AckOutcome out = newreno_on_ack(flow_, cfg_, acked, ca_growth);
        // Skip the explicit hole resend when a go-back-N rewind already has
        // snd_nxt at the hole; try_send covers it.
        if (out.retransmit_hole || (policy_recovery && snd_nxt_ > snd_una_)) retransmit_hole();
        if (flow_.phase != Phase::LossRecovery && !policy_recovery) flow_.dup_ack_count = 0;
        arm_rto_timer();
    } else if (flight_bytes() > 0 && ack.ack_bytes == snd_una_) {
        ++flow_.dup_ack_count;
        if (flow_.phase == Phase::LossRecovery) {
            flow_.cwnd += cfg_.mss;  // fast-recovery window inflation
        } else if (flow_.dup_ack_count == 3 && snd_una_ >= flow_.recover) {
            handle_third_dupack();
        }
    }

    if (controller_) controller_->on_ack(*this, advanced);
    try_send();
    // Recorded post-fill so snd_nxt marks the true end of the current round.
    if (advanced && on_ack_progress) on_ack_progress(now, snd_una_, snd_nxt_, flow_.cwnd);
}

void TcpSender::handle_third_dupack() {
    note_loss_detected();
    retransmit_hole();
    if (mode_ == CcaMode::NewReno || mode_ == CcaMode::TcpLlmL) {
        newreno_enter_fast_recovery(flow_, cfg_, snd_nxt_);
    } else {
        // Policy-owned loss response: the controller consults and applies the
        // new window; the phase never sticks in LossRecovery.
        flow_.recover = snd_nxt_;
        flow_.phase = Phase::LossRecovery;
        if (controller_) controller_->on_loss_event(*this);
        if (flow_.phase == Phase::LossRecovery) flow_.phase = Phase::CongestionAvoidance;
    }
}

void TcpReceiver::on_data(const Packet& p, VirtualTime now) {
    ++packets_received_;
    int64_t seg_start = p.seq_bytes;
    int64_t seg_end = p.seq_bytes + p.payload_bytes();
    int64_t before = rcv_next_;

    if (seg_end > rcv_next_) {
        if (seg_start <= rcv_next_) {
            rcv_next_ = seg_end;
            // Drain any buffered segments now contiguous.
            auto it = ooo_.begin();
            while (it != ooo_.end() && it->first <= rcv_next_) {
                rcv_next_ = std::max(rcv_next_, it->second);
                it = ooo_.erase(it);
            }
        } else {
            auto [it, inserted] = ooo_.emplace(seg_start, seg_end);
            if (!inserted) it->second = std::max(it->second, seg_end);
        }
    }

    if (rcv_next_ > before && on_delivered) on_delivered(now, rcv_next_ - before);

    Packet ack;
    ack.flow_id = flow_id_;
    ack.is_ack = true;
    ack.size_bytes = kAckBytes;
    ack.ack_bytes = rcv_next_;
    ack.send_time = now;
    ack.echo_send_time = p.send_time;
    ack.echo_retransmitted = p.retransmitted;
    send_ack_(ack);
}

}  // namespace ccsim
