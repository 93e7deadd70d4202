#pragma once

#include <cstdint>
#include <string>

#include "ccsim/time.hpp"
#include "ccsim/transport.hpp"

namespace ccsim {

struct HeuristicParams {
    double beta_heavy{0.5};
    double beta_mild{0.75};
    double gamma_cong{0.9};
    int64_t delta_bytes{kMss};
    VirtualTime t_probe{VirtualTime::sec(2)};
    VirtualTime eps_rtt{VirtualTime::msec(2)};
    VirtualTime eps_rtt_plus{VirtualTime::msec(4)};  // congestion gate, default 2x eps_rtt
    int64_t r_heavy{3};
    VirtualTime wait{VirtualTime::sec(2)};
    double loss_ewma_alpha{0.3};
    double loss_ewma_threshold{1.0};
};

struct HeuristicState {
    VirtualTime wait_until{};
    VirtualTime last_action_at{};
    double loss_ewma{0.0};
    bool has_prev{false};
    VirtualTime prev_rtt{};
    double prev_throughput_bps{0.0};
};

enum class HeuristicActionKind { LossCutHeavy, LossCutMild, CongCut, Probe, Hold };

struct HeuristicAction {
    HeuristicActionKind kind{HeuristicActionKind::Hold};
    int64_t cwnd{0};
    int64_t ssthresh{0};
};

const char* to_string(HeuristicActionKind k);

/// One consult of the rule-based policy. Branch priority: loss cut (acts
/// even during an armed wait), congestion cut on a per-consult RTT rise,
/// stability-gated additive probe, otherwise hold. Every non-Hold action
/// sets ssthresh = cwnd and arms the wait timer.
HeuristicAction heuristic_step(HeuristicState& hs, FlowState& fs, const PathSample& sample,
                               const HeuristicParams& p, VirtualTime now);

enum class HeuristicScenario { Static, Moderate, Fluctuating, LongRtt };

HeuristicScenario heuristic_scenario_from_string(const std::string& s);
std::string to_string(HeuristicScenario s);

/// Suggested parameter defaults by scenario.
HeuristicParams heuristic_preset(HeuristicScenario scenario);

}  // namespace ccsim
