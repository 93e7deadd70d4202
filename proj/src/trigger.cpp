#include "ccsim/trigger.hpp"

#include <cmath>

namespace ccsim {

LatencyTriggerConfig calibrate_latency(const BaselineRunRecord& run, double alpha,
                                       VirtualTime cooldown) {
    if (!run.first_loss_rtt) {
        throw NoLossObservedError("calibrate_latency: baseline run saw no packet loss");
    }
    if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("calibrate_latency: alpha must be in (0,1]");
    LatencyTriggerConfig cfg;
    cfg.baseline_first_loss_latency = *run.first_loss_rtt;
    cfg.alpha = alpha;
    cfg.cooldown = cooldown;
    cfg.threshold = VirtualTime{
        static_cast<int64_t>(alpha * static_cast<double>(run.first_loss_rtt->us))};
    return cfg;
}

int64_t round_to_nearest_thousand(int64_t n) {
    // Ties round away from zero: 7500 -> 8000.
    return ((n >= 0 ? n + 500 : n - 500) / 1000) * 1000;
}

AckTriggerConfig calibrate_ack(const BaselineRunRecord& run, double beta) {
    if (run.duration < VirtualTime::sec(10)) {
        throw ConfigError("calibrate_ack: baseline run shorter than 10 s");
    }
    AckTriggerConfig cfg;
    cfg.baseline_ack_count_10s = run.acks_in_first_10s;
    cfg.beta = beta;
    int64_t rounded = round_to_nearest_thousand(run.acks_in_first_10s);
    cfg.threshold_acks = static_cast<int64_t>(std::llround(static_cast<double>(rounded) * beta));
    if (cfg.threshold_acks < 1) {
        throw ConfigError("calibrate_ack: threshold must be at least 1 ACK");
    }
    return cfg;
}

bool should_fire_latency(const LatencyTriggerConfig& cfg, TriggerState& st,
                         VirtualTime latest_rtt, VirtualTime now) {
    if (latest_rtt <= cfg.threshold) return false;
    if (st.last_fire_at && now - *st.last_fire_at < cfg.cooldown) return false;
    st.last_fire_at = now;
    return true;
}

bool should_fire_ack(const AckTriggerConfig& cfg, TriggerState& st, VirtualTime now) {
    if (st.acks_since_fire < cfg.threshold_acks) return false;
    st.acks_since_fire = 0;
    st.last_fire_at = now;
    return true;
}

}  // namespace ccsim
