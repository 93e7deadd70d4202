#include "ccsim/transport.hpp"

#include <algorithm>

namespace ccsim {

CcaMode cca_mode_from_string(const std::string& s) {
    if (s == "newreno") return CcaMode::NewReno;
    if (s == "llm_l") return CcaMode::TcpLlmL;
    if (s == "llm_g") return CcaMode::TcpLlmG;
    if (s == "llm_g_aggressive") return CcaMode::TcpLlmGAggressive;
    if (s == "heuristic") return CcaMode::HeuristicCc;
    throw ConfigError("unknown CCA mode: " + s);
}

std::string to_string(CcaMode m) {
    switch (m) {
        case CcaMode::NewReno: return "newreno";
        case CcaMode::TcpLlmL: return "llm_l";
        case CcaMode::TcpLlmG: return "llm_g";
        case CcaMode::TcpLlmGAggressive: return "llm_g_aggressive";
        case CcaMode::HeuristicCc: return "heuristic";
    }
    return "?";
}

FlowState make_flow_state(const TcpConfig& cfg) {
    FlowState s;
    s.cwnd = cfg.initial_cwnd;
    s.ssthresh = cfg.initial_ssthresh;
    s.mss = cfg.mss;
    s.rto = VirtualTime::sec(1);
    return s;
}

AckOutcome newreno_on_ack(FlowState& s, const TcpConfig& cfg, int64_t acked_bytes,
                          bool ca_growth) {
    AckOutcome out;
    if (s.phase == Phase::RtoBackoff) {
        // First new ACK after a timeout resumes slow start.
        s.phase = Phase::Initialization;
    }
    switch (s.phase) {
        case Phase::Initialization:
            s.cwnd += std::min<int64_t>(acked_bytes, cfg.mss);
            if (s.cwnd >= s.ssthresh) s.phase = Phase::CongestionAvoidance;
            break;
        case Phase::CongestionAvoidance:
            if (ca_growth) {
                // cwnd += mss^2 / cwnd per ACK, banking the remainder so no
                // fractional growth is lost at large windows. The divisor is
                // the segment-quantized window: only whole segments circulate
                // per round trip, so this keeps growth at one MSS per RTT.
                int64_t div = std::max<int64_t>((s.cwnd / cfg.mss) * cfg.mss, cfg.mss);
                s.ca_accum += static_cast<int64_t>(cfg.mss) * cfg.mss;
                int64_t inc = s.ca_accum / div;
                s.ca_accum -= inc * div;
                s.cwnd += inc;
            }
            break;
        case Phase::LossRecovery:
            if (s.highest_acked >= s.recover) {
                // Full ACK: deflate to ssthresh and leave recovery.
                s.cwnd = s.ssthresh;
                s.phase = Phase::CongestionAvoidance;
                s.dup_ack_count = 0;
                out.exited_recovery = true;
            } else {
                // Partial ACK: retransmit the next hole, deflate by the
                // amount acked, add back one MSS.
                s.cwnd = std::max<int64_t>(s.cwnd - acked_bytes + cfg.mss, cfg.mss);
                s.dup_ack_count = 0;
                out.retransmit_hole = true;
            }
            break;
        case Phase::RtoBackoff:
            break;  // unreachable
    }
    return out;
}

void newreno_enter_fast_recovery(FlowState& s, const TcpConfig& cfg, int64_t snd_nxt) {
    s.ssthresh = std::max<int64_t>(s.cwnd / 2, 2 * static_cast<int64_t>(cfg.mss));
    s.cwnd = s.ssthresh + 3 * static_cast<int64_t>(cfg.mss);
    s.recover = snd_nxt;
    s.phase = Phase::LossRecovery;
}

void on_rto(FlowState& s, const TcpConfig& cfg, int64_t flight_bytes) {
    s.ssthresh = std::max<int64_t>(flight_bytes / 2, 2 * static_cast<int64_t>(cfg.mss));
    s.cwnd = cfg.mss;
    s.rto = std::min(VirtualTime{s.rto.us * 2}, cfg.rto_cap);
    s.phase = Phase::RtoBackoff;
    s.dup_ack_count = 0;
    s.ca_accum = 0;
}

void on_rtt_sample(FlowState& s, const TcpConfig& cfg, VirtualTime rtt) {
    if (!s.rtt_valid) {
        s.srtt = rtt;
        s.rttvar = VirtualTime{rtt.us / 2};
        s.rtt_valid = true;
    } else {
        int64_t err = std::abs(s.srtt.us - rtt.us);
        s.rttvar = VirtualTime{(3 * s.rttvar.us + err) / 4};
        s.srtt = VirtualTime{(7 * s.srtt.us + rtt.us) / 8};
    }
    int64_t rto = s.srtt.us + 4 * s.rttvar.us;
    s.rto = VirtualTime{std::clamp(rto, cfg.min_rto.us, cfg.rto_cap.us)};
}

}  // namespace ccsim
