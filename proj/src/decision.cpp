#include "ccsim/decision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <json.hpp>

namespace ccsim {

namespace {

// Returns the index one past the matching close brace, or npos.
size_t find_balanced_end(const std::string& text, size_t open) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string::npos;
}

}  // namespace

DecisionOrError parse_decision(const std::string& text) {
    size_t pos = 0;
    nlohmann::json obj;
    bool found = false;
    while ((pos = text.find('{', pos)) != std::string::npos) {
        size_t end = find_balanced_end(text, pos);
        if (end == std::string::npos) {
            ++pos;
            continue;
        }
        nlohmann::json candidate =
            nlohmann::json::parse(text.substr(pos, end - pos), nullptr, false);
        if (!candidate.is_discarded() && candidate.is_object()) {
            obj = std::move(candidate);
            found = true;
            break;
        }
        ++pos;
    }
    if (!found) return ParseError{ParseError::Kind::NoObject, "no JSON object in response"};

    auto read_key = [&](const char* key, int64_t& out) -> const char* {
        if (!obj.contains(key)) return "missing";
        const auto& v = obj.at(key);
        if (v.is_number_unsigned() && v.get<uint64_t>() > uint64_t(INT64_MAX)) {
            out = INT64_MAX;
        } else if (v.is_number_integer()) {
            out = v.get<int64_t>();
        } else if (v.is_number_float()) {
            // Saturate before the cast: out-of-range double-to-int is UB.
            double d = std::floor(v.get<double>());
            d = std::clamp(d, -9.0e18, 9.0e18);
            out = static_cast<int64_t>(d);
        } else {
            return "non-numeric";
        }
        return nullptr;
    };

    LlmDecision d;
    d.raw_text = text;
    for (const char* key : {"next_CWND", "next_SSThreshold"}) {
        int64_t value = 0;
        const char* err = read_key(key, value);
        if (err != nullptr) {
            auto kind = std::string(err) == "missing" ? ParseError::Kind::MissingKey
                                                      : ParseError::Kind::NonNumeric;
            return ParseError{kind, std::string(key) + " " + err};
        }
        (std::string(key) == "next_CWND" ? d.next_cwnd : d.next_ssthresh) = value;
    }
    return d;
}

LlmDecision apply_guardrails(LlmDecision d, int64_t current_cwnd, GuardrailMode mode,
                             const GuardrailConfig& cfg) {
    int64_t lo = cfg.mss_floor;
    int64_t hi = cfg.cwnd_hard_cap;
    if (mode == GuardrailMode::L) {
        double f = cfg.l_mode_max_step_fraction;
        lo = std::max<int64_t>(lo, static_cast<int64_t>((1.0 - f) * current_cwnd));
        hi = std::min<int64_t>(hi, static_cast<int64_t>((1.0 + f) * current_cwnd));
    } else {
        lo = std::max<int64_t>(
            lo, static_cast<int64_t>(cfg.g_mode_min_fraction_of_current * current_cwnd));
    }
    if (hi < lo) hi = lo;

    int64_t applied = std::clamp(d.next_cwnd, lo, hi);
    d.clamped = applied != d.next_cwnd;
    d.next_cwnd = applied;
    d.next_ssthresh = applied;  // applied decisions always align the threshold
    return d;
}

void apply_decision(FlowState& s, const LlmDecision& d) {
    s.cwnd = d.next_cwnd;
    s.ssthresh = d.next_ssthresh;
    s.phase = Phase::CongestionAvoidance;
}

const char* to_string(ParseError::Kind k) {
    switch (k) {
        case ParseError::Kind::NoObject: return "NoObject";
        case ParseError::Kind::MissingKey: return "MissingKey";
        case ParseError::Kind::NonNumeric: return "NonNumeric";
    }
    return "?";
}

}  // namespace ccsim
