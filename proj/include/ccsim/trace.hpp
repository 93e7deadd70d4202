#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccsim/rng.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

struct TraceStep {
    VirtualTime start;
    int64_t rate_bps;
};

/// Piecewise-constant, right-continuous bottleneck capacity schedule.
/// Steps start at strictly increasing times, the first at t=0; the final
/// rate holds forever.
class BandwidthTrace {
public:
    static BandwidthTrace constant(int64_t rate_bps);
    static BandwidthTrace from_steps(std::vector<TraceStep> steps);

    /// CSV format: header "t_start_s,bandwidth_mbps", one row per step.
    static BandwidthTrace load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

    int64_t rate_at(VirtualTime t) const;

    /// Integral of the rate over [from, to), in bits.
    double integral_bits(VirtualTime from, VirtualTime to) const;
    double mean_rate_bps(VirtualTime from, VirtualTime to) const;

    const std::vector<TraceStep>& steps() const { return steps_; }

private:
    std::vector<TraceStep> steps_;
};

enum class TraceShape { Static, Longisland, SevenTrain, QTrain };

TraceShape trace_shape_from_string(const std::string& s);
std::string to_string(TraceShape s);

/// Synthetic traces approximating the three dynamic shapes used in the
/// experiments, in 5 s steps over 120 s. `jitter` scales each step by a
/// seeded multiplicative factor in [1-jitter, 1+jitter]; 0 keeps the
/// canonical pattern.
BandwidthTrace generate_trace(TraceShape shape, double static_rate_mbps = 10.0,
                              uint64_t seed = 0, double jitter = 0.0);

}  // namespace ccsim
