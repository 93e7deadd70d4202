#pragma once

#include <cstdint>
#include <optional>

#include "ccsim/errors.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

/// Observables extracted from a recorded baseline (probe) run.
struct BaselineRunRecord {
    VirtualTime duration{};
    std::optional<VirtualTime> first_loss_rtt;  // RTT sample at first loss detection
    int64_t acks_in_first_10s{0};
};

struct LatencyTriggerConfig {
    VirtualTime baseline_first_loss_latency{};
    double alpha{0.7};
    VirtualTime cooldown{VirtualTime::sec(2)};
    VirtualTime threshold{};
};

struct AckTriggerConfig {
    int64_t baseline_ack_count_10s{0};
    double beta{0.1};
    int64_t threshold_acks{0};
};

struct TriggerState {
    std::optional<VirtualTime> last_fire_at;
    int64_t acks_since_fire{0};
};

/// Threshold = alpha * (RTT at the baseline run's first packet loss),
/// truncated to the microsecond tick.
LatencyTriggerConfig calibrate_latency(const BaselineRunRecord& run, double alpha,
                                       VirtualTime cooldown = VirtualTime::sec(2));

/// Rounds the baseline's 10 s ACK count to the nearest thousand (ties away
/// from zero), then threshold = round(rounded * beta).
AckTriggerConfig calibrate_ack(const BaselineRunRecord& run, double beta);

int64_t round_to_nearest_thousand(int64_t n);

/// Fires when the latest RTT exceeds the threshold and at least `cooldown`
/// has elapsed since the previous firing.
bool should_fire_latency(const LatencyTriggerConfig& cfg, TriggerState& st,
                         VirtualTime latest_rtt, VirtualTime now);

/// Counter-paced: the caller increments acks_since_fire once per ACK before
/// asking; fires when the count reaches the threshold and resets it.
bool should_fire_ack(const AckTriggerConfig& cfg, TriggerState& st, VirtualTime now);

}  // namespace ccsim
