#include "ccsim/heuristic.hpp"

#include <cmath>

#include "ccsim/errors.hpp"

namespace ccsim {

const char* to_string(HeuristicActionKind k) {
    switch (k) {
        case HeuristicActionKind::LossCutHeavy: return "loss_cut_heavy";
        case HeuristicActionKind::LossCutMild: return "loss_cut_mild";
        case HeuristicActionKind::CongCut: return "cong_cut";
        case HeuristicActionKind::Probe: return "probe";
        case HeuristicActionKind::Hold: return "hold";
    }
    return "?";
}

HeuristicAction heuristic_step(HeuristicState& hs, FlowState& fs, const PathSample& sample,
                               const HeuristicParams& p, VirtualTime now) {
    const int64_t mss = fs.mss;
    VirtualTime d_rtt = hs.has_prev ? sample.rtt - hs.prev_rtt : VirtualTime{0};
    double d_tp = hs.has_prev ? sample.throughput_bps - hs.prev_throughput_bps : 0.0;
    int64_t retx = sample.retransmits;

    HeuristicAction act;
    auto arm = [&](HeuristicActionKind kind, int64_t new_cwnd) {
        fs.cwnd = std::max<int64_t>(new_cwnd, mss);
        fs.ssthresh = fs.cwnd;
        hs.wait_until = now + p.wait;
        hs.last_action_at = now;
        act = {kind, fs.cwnd, fs.ssthresh};
    };

    if (retx > 0) {
        // Loss acts even during an armed wait.
        bool heavy = retx >= p.r_heavy || hs.loss_ewma >= p.loss_ewma_threshold;
        double beta = heavy ? p.beta_heavy : p.beta_mild;
        arm(heavy ? HeuristicActionKind::LossCutHeavy : HeuristicActionKind::LossCutMild,
            static_cast<int64_t>(std::floor(beta * static_cast<double>(fs.cwnd))));
    } else if (now < hs.wait_until) {
        act = {HeuristicActionKind::Hold, fs.cwnd, fs.ssthresh};
    } else if (d_rtt >= p.eps_rtt_plus) {
        arm(HeuristicActionKind::CongCut,
            static_cast<int64_t>(std::floor(p.gamma_cong * static_cast<double>(fs.cwnd))));
    } else if (now - hs.last_action_at >= p.t_probe &&
               VirtualTime{std::abs(d_rtt.us)} <= p.eps_rtt && d_tp >= 0.0) {
        arm(HeuristicActionKind::Probe, fs.cwnd + p.delta_bytes);
    } else {
        act = {HeuristicActionKind::Hold, fs.cwnd, fs.ssthresh};
    }

    hs.loss_ewma = (1.0 - p.loss_ewma_alpha) * hs.loss_ewma +
                   p.loss_ewma_alpha * static_cast<double>(retx);
    hs.prev_rtt = sample.rtt;
    hs.prev_throughput_bps = sample.throughput_bps;
    hs.has_prev = true;
    return act;
}

HeuristicScenario heuristic_scenario_from_string(const std::string& s) {
    if (s == "static") return HeuristicScenario::Static;
    if (s == "moderate") return HeuristicScenario::Moderate;
    if (s == "fluctuating") return HeuristicScenario::Fluctuating;
    if (s == "long_rtt") return HeuristicScenario::LongRtt;
    throw ConfigError("unknown heuristic scenario: " + s);
}

std::string to_string(HeuristicScenario s) {
    switch (s) {
        case HeuristicScenario::Static: return "static";
        case HeuristicScenario::Moderate: return "moderate";
        case HeuristicScenario::Fluctuating: return "fluctuating";
        case HeuristicScenario::LongRtt: return "long_rtt";
    }
    return "?";
}

HeuristicParams heuristic_preset(HeuristicScenario scenario) {
    HeuristicParams p;
    switch (scenario) {
        case HeuristicScenario::Static:
            p.t_probe = VirtualTime::sec(2);
            p.delta_bytes = kMss;
            p.eps_rtt = VirtualTime::msec(2);
            break;
        case HeuristicScenario::Moderate:
            p.t_probe = VirtualTime::msec(1500);
            p.delta_bytes = 2 * kMss;
            p.eps_rtt = VirtualTime::msec(3);
            break;
        case HeuristicScenario::Fluctuating:
            p.t_probe = VirtualTime::msec(1250);
            p.delta_bytes = 2 * kMss;
            p.eps_rtt = VirtualTime::usec(4500);
            p.r_heavy = 3;
            break;
        case HeuristicScenario::LongRtt:
            p.t_probe = VirtualTime::msec(3500);
            p.delta_bytes = kMss;
            p.eps_rtt = VirtualTime::msec(10);
            break;
    }
    p.eps_rtt_plus = VirtualTime{2 * p.eps_rtt.us};
    return p;
}

}  // namespace ccsim
