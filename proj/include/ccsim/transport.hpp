#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "ccsim/errors.hpp"
#include "ccsim/packet.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

enum class Phase { Initialization, CongestionAvoidance, LossRecovery, RtoBackoff };

enum class CcaMode { NewReno, TcpLlmL, TcpLlmG, TcpLlmGAggressive, HeuristicCc };

CcaMode cca_mode_from_string(const std::string& s);
std::string to_string(CcaMode m);

struct TcpConfig {
    int32_t mss{kMss};
    int64_t initial_cwnd{14480};  // 10 segments
    int64_t initial_ssthresh{65535};
    VirtualTime min_rto{VirtualTime::msec(200)};
    VirtualTime rto_cap{VirtualTime::sec(60)};
    VirtualTime throughput_window{VirtualTime::sec(1)};
};

struct FlowState {
    int64_t cwnd{14480};
    int64_t ssthresh{65535};
    Phase phase{Phase::Initialization};
    int32_t mss{kMss};

    VirtualTime srtt{};
    VirtualTime rttvar{};
    VirtualTime rto{VirtualTime::sec(1)};
    bool rtt_valid{false};

    int dup_ack_count{0};
    int64_t highest_acked{0};  // snd_una
    int64_t recover{0};        // recovery point for the current loss event
    int64_t retransmit_count_window{0};
    int64_t ca_accum{0};  // congestion-avoidance byte accumulator
};

FlowState make_flow_state(const TcpConfig& cfg);

struct AckOutcome {
    bool retransmit_hole{false};  // NewReno partial ACK: resend next lost segment
    bool exited_recovery{false};
};

/// NewReno response to an ACK that advanced highest_acked by `acked_bytes`
/// (the caller advances highest_acked first). Handles slow start, the
/// byte-accumulator congestion-avoidance increase, RTO-backoff re-entry into
/// slow start, and RFC 6582 partial/full-ACK recovery exit. `ca_growth`
/// disables the congestion-avoidance increment for window-holding modes.
AckOutcome newreno_on_ack(FlowState& s, const TcpConfig& cfg, int64_t acked_bytes,
                          bool ca_growth = true);

/// Third-duplicate-ACK entry into fast recovery: ssthresh = max(cwnd/2,
/// 2 MSS), cwnd = ssthresh + 3 MSS, recover = snd_nxt.
void newreno_enter_fast_recovery(FlowState& s, const TcpConfig& cfg, int64_t snd_nxt);

/// Retransmission timeout: ssthresh = max(flight/2, 2 MSS), cwnd = 1 MSS,
/// RTO doubles up to the cap. Applies identically in every CCA mode.
void on_rto(FlowState& s, const TcpConfig& cfg, int64_t flight_bytes);

/// RFC 6298 smoothing (alpha = 1/8, beta = 1/4); caller passes only
/// Karn-valid samples (never from retransmitted segments).
void on_rtt_sample(FlowState& s, const TcpConfig& cfg, VirtualTime rtt);

struct PathSample {
    VirtualTime at{};
    int64_t cwnd{0};
    VirtualTime rtt{};
    double throughput_bps{0.0};
    int64_t retransmits{0};  // since the previous sample
};

/// Per-flow measurement state: latest Karn-valid RTT plus a trailing-window
/// throughput meter over newly acked bytes.
class PathSampler {
public:
    explicit PathSampler(VirtualTime window) : window_(window) {}

    void on_acked_bytes(VirtualTime now, int64_t bytes) {
        acked_.push_back({now, bytes});
        acked_sum_ += bytes;
        prune(now);
    }

    void on_rtt(VirtualTime rtt) {
        latest_rtt_ = rtt;
        has_rtt_ = true;
    }

    bool has_rtt() const { return has_rtt_; }
    VirtualTime latest_rtt() const { return latest_rtt_; }

    double throughput_bps(VirtualTime now) {
        prune(now);
        return static_cast<double>(acked_sum_) * 8.0 / window_.to_seconds();
    }

    /// Builds a sample and resets the flow's retransmit-delta counter.
    PathSample sample(VirtualTime now, FlowState& s) {
        if (!has_rtt_) throw NoMeasurementError("sample_path: no RTT measured yet");
        PathSample ps{now, s.cwnd, latest_rtt_, throughput_bps(now), s.retransmit_count_window};
        s.retransmit_count_window = 0;
        return ps;
    }

private:
    void prune(VirtualTime now) {
        VirtualTime cutoff = now - window_;
        while (!acked_.empty() && acked_.front().first <= cutoff) {
            acked_sum_ -= acked_.front().second;
            acked_.pop_front();
        }
    }

    VirtualTime window_;
    std::deque<std::pair<VirtualTime, int64_t>> acked_;
    int64_t acked_sum_{0};
    VirtualTime latest_rtt_{};
    bool has_rtt_{false};
};

}  // namespace ccsim
