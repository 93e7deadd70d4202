#pragma once

#include <cstdint>

#include "ccsim/time.hpp"

namespace ccsim {

constexpr int32_t kMss = 1448;
constexpr int32_t kHeaderBytes = 40;
constexpr int32_t kAckBytes = kHeaderBytes;

struct Packet {
    int flow_id{0};
    int64_t seq_bytes{0};   // payload byte offset of the first byte
    int32_t size_bytes{0};  // payload + header on the wire
    bool is_ack{false};
    VirtualTime send_time{};
    bool retransmitted{false};

    // ACK-only fields.
    int64_t ack_bytes{0};  // cumulative: next expected payload byte
    VirtualTime echo_send_time{};
    bool echo_retransmitted{false};

    int32_t payload_bytes() const { return is_ack ? 0 : size_bytes - kHeaderBytes; }
};

inline Packet make_data_packet(int flow_id, int64_t seq, int32_t payload, VirtualTime now,
                               bool retx) {
    Packet p;
    p.flow_id = flow_id;
    p.seq_bytes = seq;
    p.size_bytes = payload + kHeaderBytes;
    p.send_time = now;
    p.retransmitted = retx;
    return p;
}

}  // namespace ccsim
