#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ccsim/event_loop.hpp"
#include "ccsim/packet.hpp"
#include "ccsim/transport.hpp"

namespace ccsim {

class TcpSender;

/// Per-flow congestion-policy glue installed by the harness. The base class
/// is plain NewReno (the sender's built-in machinery does everything).
class CcController {
public:
    virtual ~CcController() = default;
    virtual void on_start(TcpSender&) {}
    /// Called after each ACK is processed (duplicates included).
    virtual void on_ack(TcpSender&, bool advanced) { (void)advanced; }
    /// Called at the third duplicate ACK, after the lost segment has been
    /// retransmitted, for modes where the policy owns the window response.
    virtual void on_loss_event(TcpSender&) {}
};

/// Bulk-data TCP-like sender. Implements slow start, NewReno congestion
/// avoidance / fast recovery, RTO backoff, Karn-filtered RTT estimation and
/// path sampling; mode-specific window policies hook in via CcController.
class TcpSender {
public:
    TcpSender(EventLoop& loop, int flow_id, CcaMode mode, TcpConfig cfg,
              std::function<void(Packet)> emit);

    void set_controller(CcController* c) { controller_ = c; }
    void start(VirtualTime at);
    void on_ack_packet(const Packet& ack);

    FlowState& flow() { return flow_; }
    const TcpConfig& config() const { return cfg_; }
    CcaMode mode() const { return mode_; }
    int flow_id() const { return flow_id_; }
    EventLoop& loop() { return loop_; }
    PathSampler& sampler() { return sampler_; }

    int64_t snd_nxt() const { return snd_nxt_; }
    int64_t snd_una() const { return snd_una_; }
    int64_t flight_bytes() const { return snd_nxt_ - snd_una_; }

    int64_t acks_received() const { return acks_received_; }
    int64_t bytes_sent() const { return bytes_sent_; }
    int64_t packets_sent() const { return packets_sent_; }
    int64_t retransmit_total() const { return retransmit_total_; }
    std::optional<VirtualTime> first_loss_rtt() const { return first_loss_rtt_; }

    /// Takes a fresh path sample, appends it to the flow's ring buffer.
    PathSample sample_path();
    const std::deque<PathSample>& ring() const { return ring_; }

    /// Sends new segments while bytes in flight stay within cwnd.
    void try_send();

    /// Retransmits the segment at snd_una (marked, Karn-excluded).
    void retransmit_hole();

    // Observation hooks (metrics layer).
    std::function<void(VirtualTime, VirtualTime rtt, double thr_bps)> on_rtt_observed;
    std::function<void(VirtualTime, int64_t snd_una, int64_t snd_nxt, int64_t cwnd)>
        on_ack_progress;

private:
    void handle_third_dupack();
    void handle_rto();
    void arm_rto_timer();
    void note_loss_detected();

    EventLoop& loop_;
    int flow_id_;
    CcaMode mode_;
    TcpConfig cfg_;
    std::function<void(Packet)> emit_;
    CcController* controller_{nullptr};

    FlowState flow_;
    PathSampler sampler_;
    std::deque<PathSample> ring_;
    size_t ring_capacity_{64};

    int64_t snd_nxt_{0};
    int64_t snd_una_{0};
    int64_t retransmit_high_water_{0};

    int64_t acks_received_{0};
    int64_t bytes_sent_{0};
    int64_t packets_sent_{0};
    int64_t retransmit_total_{0};
    std::optional<VirtualTime> first_loss_rtt_;

    uint64_t rto_timer_gen_{0};
    bool rto_timer_armed_{false};
};

/// Receiving endpoint: cumulative ACKs with duplicate ACKs on reordering,
/// out-of-order buffering, in-order delivery accounting.
class TcpReceiver {
public:
    TcpReceiver(int flow_id, std::function<void(Packet)> send_ack)
        : flow_id_(flow_id), send_ack_(std::move(send_ack)) {}

    void on_data(const Packet& p, VirtualTime now);

    int64_t delivered_bytes() const { return rcv_next_; }
    int64_t packets_received() const { return packets_received_; }

    /// Fires when in-order delivery advances: (now, newly delivered bytes).
    std::function<void(VirtualTime, int64_t)> on_delivered;

private:
    int flow_id_;
    std::function<void(Packet)> send_ack_;
    int64_t rcv_next_{0};
    std::map<int64_t, int64_t> ooo_;  // start -> end, disjoint
    int64_t packets_received_{0};
};

}  // namespace ccsim
