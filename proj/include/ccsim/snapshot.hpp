#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "ccsim/transport.hpp"

namespace ccsim {

/// The policy's observable world: current and previous window/RTT/throughput
/// readings plus most-recent-first histories of length <= H.
struct NetSnapshot {
    int64_t last_cwnd{0};
    int64_t current_cwnd{0};
    int64_t ssthresh{0};
    double last_rtt_s{0};
    double current_rtt_s{0};
    double last_throughput_mbps{0};
    double current_throughput_mbps{0};
    int64_t current_retransmit_packets{0};
    std::vector<int64_t> history_cwnd;
    std::vector<double> history_rtt_s;
    std::vector<double> history_throughput_mbps;
    std::vector<int64_t> history_retransmit;
};

/// Builds a snapshot from the flow's sample ring (newest first). With a
/// single sample, last_* duplicates current_*; histories are never padded.
NetSnapshot build_snapshot(const std::deque<PathSample>& ring, int history_len,
                           int64_t ssthresh);

}  // namespace ccsim
