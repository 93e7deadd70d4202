#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace ccsim {

/// Virtual simulation time in integer microseconds. All wall-clock
/// quantities in the simulator (RTTs, cooldowns, trace steps) are exactly
/// representable at this resolution.
struct VirtualTime {
    int64_t us{0};

    static constexpr VirtualTime usec(int64_t v) { return VirtualTime{v}; }
    static constexpr VirtualTime msec(int64_t v) { return VirtualTime{v * 1000}; }
    static constexpr VirtualTime sec(int64_t v) { return VirtualTime{v * 1'000'000}; }
    static VirtualTime from_seconds(double s) {
        return VirtualTime{static_cast<int64_t>(std::llround(s * 1e6))};
    }

    constexpr double to_seconds() const { return static_cast<double>(us) / 1e6; }
    constexpr double to_millis() const { return static_cast<double>(us) / 1e3; }

    constexpr auto operator<=>(const VirtualTime&) const = default;

    constexpr VirtualTime operator+(VirtualTime o) const { return VirtualTime{us + o.us}; }
    constexpr VirtualTime operator-(VirtualTime o) const { return VirtualTime{us - o.us}; }
    constexpr VirtualTime& operator+=(VirtualTime o) {
        us += o.us;
        return *this;
    }
    constexpr VirtualTime operator*(int64_t k) const { return VirtualTime{us * k}; }
};

}  // namespace ccsim
