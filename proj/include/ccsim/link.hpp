#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>

#include "ccsim/event_loop.hpp"
#include "ccsim/packet.hpp"
#include "ccsim/trace.hpp"

namespace ccsim {

/// Serialization time of `size_bytes` at `rate_bps`, rounded up to the
/// microsecond tick so a link can never deliver more than its rate allows.
inline VirtualTime serialization_time(int64_t size_bytes, int64_t rate_bps) {
    int64_t bit_us = size_bytes * 8 * 1'000'000;
    return VirtualTime{(bit_us + rate_bps - 1) / rate_bps};
}

struct LinkSpec {
    // Exactly one rate source: a fixed rate or a trace (owned elsewhere).
    int64_t rate_bps{0};
    const BandwidthTrace* trace{nullptr};
    VirtualTime one_way_delay{};
    int queue_capacity{1};
};

/// Unidirectional link: drop-tail FIFO feeding a serializer, then a fixed
/// propagation delay. The serialization rate is latched when a packet's
/// transmission begins; mid-packet rate changes do not re-rate it.
class Link {
public:
    using Deliver = std::function<void(Packet)>;

    Link(EventLoop& loop, LinkSpec spec, Deliver deliver)
        : loop_(loop), spec_(spec), deliver_(std::move(deliver)) {
        if (spec_.queue_capacity < 1) throw ConfigError("link: queue_capacity must be >= 1");
        if (spec_.trace == nullptr && spec_.rate_bps <= 0) {
            throw ConfigError("link: rate must be positive");
        }
    }

    enum class EnqueueResult { Enqueued, Dropped };

    /// Occupancy counts queued packets plus the one in service.
    EnqueueResult enqueue(Packet p) {
        if (occupancy() >= spec_.queue_capacity) {
            ++drops_;
            if (on_drop_) on_drop_(p);
            return EnqueueResult::Dropped;
        }
        queue_.push_back(std::move(p));
        if (!busy_) start_service();
        return EnqueueResult::Enqueued;
    }

    int occupancy() const { return static_cast<int>(queue_.size()) + (busy_ ? 1 : 0); }
    int64_t drops() const { return drops_; }
    int64_t delivered() const { return delivered_; }
    int queue_capacity() const { return spec_.queue_capacity; }

    void set_drop_hook(std::function<void(const Packet&)> f) { on_drop_ = std::move(f); }

    int64_t rate_now() const {
        return spec_.trace ? spec_.trace->rate_at(loop_.now()) : spec_.rate_bps;
    }

private:
    void start_service() {
        busy_ = true;
        in_service_ = std::move(queue_.front());
        queue_.pop_front();
        VirtualTime done = loop_.now() + serialization_time(in_service_.size_bytes, rate_now());
        loop_.schedule(done, [this] { finish_service(); });
    }

    void finish_service() {
        Packet p = std::move(in_service_);
        busy_ = false;
        if (!queue_.empty()) start_service();
        ++delivered_;
        if (spec_.one_way_delay.us > 0) {
            loop_.schedule_in(spec_.one_way_delay, [this, p = std::move(p)] { deliver_(p); });
        } else {
            deliver_(p);
        }
    }

    EventLoop& loop_;
    LinkSpec spec_;
    Deliver deliver_;
    std::deque<Packet> queue_;
    Packet in_service_;
    bool busy_{false};
    int64_t drops_{0};
    int64_t delivered_{0};
    std::function<void(const Packet&)> on_drop_;
};

/// Pure-delay pipe for the uncongested reverse (ACK) path: never queues,
/// never drops.
class DelayPipe {
public:
    DelayPipe(EventLoop& loop, VirtualTime delay, Link::Deliver deliver)
        : loop_(loop), delay_(delay), deliver_(std::move(deliver)) {}

    void send(Packet p) {
        loop_.schedule_in(delay_, [this, p = std::move(p)] { deliver_(p); });
    }

private:
    EventLoop& loop_;
    VirtualTime delay_;
    Link::Deliver deliver_;
};

}  // namespace ccsim
