#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

struct RunConfig {
    VirtualTime duration{VirtualTime::sec(120)};
    uint64_t seed{1};
    VirtualTime queue_sample_interval{VirtualTime::msec(10)};
};

struct RunStats {
    uint64_t events_processed{0};
    VirtualTime final_time{};
};

/// Single-threaded virtual-time event loop. Events fire in (fire_at, seq)
/// order; seq is a monotone insertion counter, so ties at the same instant
/// run in insertion order.
class EventLoop {
public:
    using Handle = uint64_t;
    using Action = std::function<void()>;

    explicit EventLoop(uint64_t seed = 1) : rng_(seed) {}

    VirtualTime now() const { return now_; }
    Rng& rng() { return rng_; }

    Handle schedule(VirtualTime fire_at, Action action) {
        if (fire_at < now_) {
            throw PastEventError("schedule: fire_at precedes current virtual time");
        }
        Handle h = next_seq_++;
        queue_.push(Entry{fire_at, h, std::move(action)});
        return h;
    }

    Handle schedule_in(VirtualTime delay, Action action) {
        return schedule(now_ + delay, std::move(action));
    }

    /// Cancels a pending event. Returns false if it already fired or was
    /// already cancelled.
    bool cancel(Handle h) {
        if (h >= next_seq_) return false;
        return cancelled_.insert(h).second;
    }

    /// Processes every event with fire_at <= t_end (inclusive boundary),
    /// then advances the clock to t_end.
    RunStats run_until(VirtualTime t_end) {
        RunStats stats;
        while (!queue_.empty() && queue_.top().fire_at <= t_end) {
            Entry e = std::move(const_cast<Entry&>(queue_.top()));
            queue_.pop();
            if (auto it = cancelled_.find(e.seq); it != cancelled_.end()) {
                cancelled_.erase(it);
                continue;
            }
            now_ = e.fire_at;
            e.action();
            ++stats.events_processed;
        }
        if (t_end > now_) now_ = t_end;
        stats.final_time = now_;
        return stats;
    }

    size_t pending() const { return queue_.size(); }

private:
    struct Entry {
        VirtualTime fire_at;
        uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.fire_at.us != b.fire_at.us) return a.fire_at.us > b.fire_at.us;
            return a.seq > b.seq;
        }
    };

    VirtualTime now_{};
    uint64_t next_seq_{0};
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::unordered_set<Handle> cancelled_;
    Rng rng_;
};

}  // namespace ccsim
