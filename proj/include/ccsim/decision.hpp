#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "ccsim/transport.hpp"

namespace ccsim {

struct GuardrailConfig {
    int64_t mss_floor{1448};
    double l_mode_max_step_fraction{0.5};
    double g_mode_min_fraction_of_current{0.1};
    int64_t cwnd_hard_cap{10 * 1024 * 1024};
};

struct LlmDecision {
    int64_t next_cwnd{0};
    int64_t next_ssthresh{0};
    std::string raw_text;
    bool clamped{false};
};

struct ParseError {
    enum class Kind { NoObject, MissingKey, NonNumeric };
    Kind kind;
    std::string detail;
};

using DecisionOrError = std::variant<LlmDecision, ParseError>;

/// Extracts the first well-formed JSON object from arbitrary model output
/// (code fences and surrounding prose tolerated) and reads the numeric
/// next_CWND / next_SSThreshold pair, flooring fractional values. Never
/// throws on any input text.
DecisionOrError parse_decision(const std::string& text);

enum class GuardrailMode { L, G };

/// TCP-safe clamping. Both modes floor at mss_floor and cap at the hard cap.
/// L additionally bounds each step to +-50% of the current window; G bounds
/// decreases below by max(floor, 0.1 * current) while leaving increases free
/// up to the cap. The applied ssthresh always equals the applied cwnd.
LlmDecision apply_guardrails(LlmDecision d, int64_t current_cwnd, GuardrailMode mode,
                             const GuardrailConfig& cfg);

/// Installs a clamped decision: cwnd = ssthresh = next_cwnd and the flow
/// continues in congestion avoidance (never back through slow start).
void apply_decision(FlowState& s, const LlmDecision& d);

const char* to_string(ParseError::Kind k);

}  // namespace ccsim
