#include "ccsim/snapshot.hpp"

#include "ccsim/errors.hpp"

namespace ccsim {

NetSnapshot build_snapshot(const std::deque<PathSample>& ring, int history_len,
                           int64_t ssthresh) {
    if (ring.empty()) throw EmptyRingError("build_snapshot: no samples yet");
    NetSnapshot s;
    const PathSample& cur = ring[0];
    const PathSample& last = ring.size() > 1 ? ring[1] : ring[0];

    s.current_cwnd = cur.cwnd;
    s.current_rtt_s = cur.rtt.to_seconds();
    s.current_throughput_mbps = cur.throughput_bps / 1e6;
    s.current_retransmit_packets = cur.retransmits;
    s.last_cwnd = last.cwnd;
    s.last_rtt_s = last.rtt.to_seconds();
    s.last_throughput_mbps = last.throughput_bps / 1e6;
    s.ssthresh = ssthresh;

    size_t n = std::min<size_t>(static_cast<size_t>(history_len), ring.size());
    for (size_t i = 0; i < n; ++i) {
        s.history_cwnd.push_back(ring[i].cwnd);
        s.history_rtt_s.push_back(ring[i].rtt.to_seconds());
        s.history_throughput_mbps.push_back(ring[i].throughput_bps / 1e6);
        s.history_retransmit.push_back(ring[i].retransmits);
    }
    return s;
}

}  // namespace ccsim
