#include "ccsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccsim/errors.hpp"

namespace ccsim {

BandwidthTrace BandwidthTrace::constant(int64_t rate_bps) {
    return from_steps({TraceStep{VirtualTime{0}, rate_bps}});
}

BandwidthTrace BandwidthTrace::from_steps(std::vector<TraceStep> steps) {
    if (steps.empty()) throw ConfigError("trace: no steps");
    if (steps.front().start.us != 0) throw ConfigError("trace: first step must start at 0");
    for (size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].rate_bps <= 0) throw ConfigError("trace: rates must be positive");
        if (i > 0 && steps[i].start <= steps[i - 1].start) {
            throw ConfigError("trace: start times must be strictly increasing");
        }
    }
    BandwidthTrace t;
    t.steps_ = std::move(steps);
    return t;
}

int64_t BandwidthTrace::rate_at(VirtualTime t) const {
    // Last step with start <= t; the final rate holds past the last step.
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](VirtualTime v, const TraceStep& s) { return v < s.start; });
    return std::prev(it)->rate_bps;
}

double BandwidthTrace::integral_bits(VirtualTime from, VirtualTime to) const {
    if (to <= from) return 0.0;
    double bits = 0.0;
    VirtualTime cursor = from;
    for (size_t i = 0; i < steps_.size() && cursor < to; ++i) {
        VirtualTime seg_end = (i + 1 < steps_.size()) ? steps_[i + 1].start : to;
        if (seg_end <= cursor) continue;
        VirtualTime end = std::min(seg_end, to);
        if (end > cursor) {
            bits += static_cast<double>(steps_[i].rate_bps) * (end - cursor).to_seconds();
            cursor = end;
        }
    }
    if (cursor < to) {
        bits += static_cast<double>(steps_.back().rate_bps) * (to - cursor).to_seconds();
    }
    return bits;
}

double BandwidthTrace::mean_rate_bps(VirtualTime from, VirtualTime to) const {
    if (to <= from) return 0.0;
    return integral_bits(from, to) / (to - from).to_seconds();
}

BandwidthTrace BandwidthTrace::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("trace: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trace: empty file " + path);
    if (line.find("t_start_s") == std::string::npos) {
        throw ConfigError("trace: missing header in " + path);
    }
    std::vector<TraceStep> steps;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string t_field, r_field;
        if (!std::getline(row, t_field, ',') || !std::getline(row, r_field, ',')) {
            throw ConfigError("trace: malformed row '" + line + "'");
        }
        double t_s = 0, mbps = 0;
        try {
            t_s = std::stod(t_field);
            mbps = std::stod(r_field);
        } catch (const std::exception&) {
            throw ConfigError("trace: non-numeric row '" + line + "'");
        }
        if (t_s < 0) throw ConfigError("trace: negative start time");
        steps.push_back({VirtualTime::from_seconds(t_s),
                         static_cast<int64_t>(std::llround(mbps * 1e6))});
    }
    return from_steps(std::move(steps));
}

void BandwidthTrace::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("trace: cannot write " + path);
    out << "t_start_s,bandwidth_mbps\n";
    char buf[64];
    for (const auto& s : steps_) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.4f\n", s.start.to_seconds(),
                      static_cast<double>(s.rate_bps) / 1e6);
        out << buf;
    }
}

TraceShape trace_shape_from_string(const std::string& s) {
    if (s == "static") return TraceShape::Static;
    if (s == "longisland") return TraceShape::Longisland;
    if (s == "7train") return TraceShape::SevenTrain;
    if (s == "qtrain") return TraceShape::QTrain;
    throw ConfigError("unknown trace shape: " + s);
}

std::string to_string(TraceShape s) {
    switch (s) {
        case TraceShape::Static: return "static";
        case TraceShape::Longisland: return "longisland";
        case TraceShape::SevenTrain: return "7train";
        case TraceShape::QTrain: return "qtrain";
    }
    return "?";
}

namespace {

// Canonical 5 s step patterns (Mb/s), 24 steps covering 120 s.
// longisland: 2 Mb/s floor, one spike rising through 20-50 s to 10 Mb/s and
// collapsing back to the floor at 50 s; overall mean ~3 Mb/s.
constexpr double kLongisland[24] = {2, 2,  2, 2,  3, 4, 5, 7, 10, 10, 2, 2,
                                    2, 2,  2, 2,  2, 2, 2, 2, 2,  2,  2, 2};
// 7train: 1-2 Mb/s for the first 40 s, then a steady ramp from 60 s,
// overall mean ~8.2 Mb/s.
constexpr double kSevenTrain[24] = {1,   2,    1.5, 2,    1,   2,    1.5, 2,
                                    4,   4,    5,   5,    5.5, 7,    8.5, 10,
                                    11.5, 13,  14.5, 16,  17.5, 19,  20.5, 22};
// qtrain: ~20 Mb/s over 0-45 s, abrupt drop, spike, then a rising tail;
// overall mean ~18 Mb/s.
constexpr double kQTrain[24] = {20, 22, 19, 21, 20, 18, 22, 20, 21, 12, 8,  6,
                                8,  22, 26, 24, 20, 12, 14, 16, 18, 20, 22, 24};

}  // namespace

BandwidthTrace generate_trace(TraceShape shape, double static_rate_mbps, uint64_t seed,
                              double jitter) {
    if (shape == TraceShape::Static) {
        return BandwidthTrace::constant(static_cast<int64_t>(std::llround(static_rate_mbps * 1e6)));
    }
    const double* pattern = shape == TraceShape::Longisland ? kLongisland
                          : shape == TraceShape::SevenTrain ? kSevenTrain
                                                            : kQTrain;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<TraceStep> steps;
    steps.reserve(24);
    for (int i = 0; i < 24; ++i) {
        double mbps = pattern[i];
        if (jitter > 0) mbps *= rng.uniform(1.0 - jitter, 1.0 + jitter);
        mbps = std::max(mbps, 0.1);
        steps.push_back({VirtualTime::sec(5 * i), static_cast<int64_t>(std::llround(mbps * 1e6))});
    }
    return BandwidthTrace::from_steps(std::move(steps));
}

}  // namespace ccsim
