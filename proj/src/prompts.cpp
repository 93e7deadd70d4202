#include "ccsim/prompts.hpp"

#include <cstdio>
#include <sstream>

#include "ccsim/errors.hpp"
#include "ccsim/prompt_templates.hpp"

namespace ccsim {

PromptScheme prompt_scheme_from_string(const std::string& s) {
    if (s == "math_l") return PromptScheme::MathL;
    if (s == "natural_l") return PromptScheme::NaturalL;
    if (s == "general_g") return PromptScheme::GeneralG;
    if (s == "general_g_aggressive") return PromptScheme::GeneralGAggressive;
    throw ConfigError("unknown prompt scheme: " + s);
}

std::string to_string(PromptScheme s) {
    switch (s) {
        case PromptScheme::MathL: return "math_l";
        case PromptScheme::NaturalL: return "natural_l";
        case PromptScheme::GeneralG: return "general_g";
        case PromptScheme::GeneralGAggressive: return "general_g_aggressive";
    }
    return "?";
}

const char* prompt_template(PromptScheme scheme) {
    switch (scheme) {
        case PromptScheme::MathL: return prompt_text::kMathL;
        case PromptScheme::NaturalL: return prompt_text::kNaturalL;
        case PromptScheme::GeneralG: return prompt_text::kGeneralG;
        case PromptScheme::GeneralGAggressive: return prompt_text::kGeneralGAggressive;
    }
    return "";
}

namespace {

std::string fmt_seconds(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_mbps(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

template <typename T, typename Fmt>
std::string fmt_list(const std::vector<T>& xs, Fmt fmt) {
    std::ostringstream out;
    out << '[';
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ", ";
        out << fmt(xs[i]);
    }
    out << ']';
    return out.str();
}

std::string render_user_l(const NetSnapshot& s) {
    std::ostringstream out;
    out << "last_cwnd: " << s.last_cwnd << '\n';
    out << "current_cwnd: " << s.current_cwnd << '\n';
    out << "ssthreshold: " << s.ssthresh << '\n';
    out << "last_rtt: " << fmt_seconds(s.last_rtt_s) << '\n';
    out << "current_rtt: " << fmt_seconds(s.current_rtt_s) << '\n';
    out << "current_throughput: " << fmt_mbps(s.current_throughput_mbps) << '\n';
    out << "last_throughput: " << fmt_mbps(s.last_throughput_mbps) << '\n';
    out << "CWNDs (most recent first): "
        << fmt_list(s.history_cwnd, [](int64_t v) { return std::to_string(v); }) << '\n';
    out << "RTTs (most recent first): " << fmt_list(s.history_rtt_s, fmt_seconds) << '\n';
    out << "Throughput values (most recent first): "
        << fmt_list(s.history_throughput_mbps, fmt_mbps) << '\n';
    return out.str();
}

std::string render_user_g(const NetSnapshot& s) {
    std::ostringstream out;
    out << "last_cwnd: " << s.last_cwnd << '\n';
    out << "current_cwnd: " << s.current_cwnd << '\n';
    out << "ssthreshold: " << s.ssthresh << '\n';
    out << "last_rtt: " << fmt_seconds(s.last_rtt_s) << '\n';
    out << "current_rtt: " << fmt_seconds(s.current_rtt_s) << '\n';
    out << "last_throughput: " << fmt_mbps(s.last_throughput_mbps) << '\n';
    out << "current_throughput: " << fmt_mbps(s.current_throughput_mbps) << '\n';
    out << "current_retransmit_packet: " << s.current_retransmit_packets << '\n';
    out << "history_cwnd: "
        << fmt_list(s.history_cwnd, [](int64_t v) { return std::to_string(v); }) << '\n';
    out << "history_rtt: " << fmt_list(s.history_rtt_s, fmt_seconds) << '\n';
    out << "history_throughput: " << fmt_list(s.history_throughput_mbps, fmt_mbps) << '\n';
    out << "history_retransmit_packet: "
        << fmt_list(s.history_retransmit, [](int64_t v) { return std::to_string(v); }) << '\n';
    return out.str();
}

}  // namespace

MessagePair render_prompt(PromptScheme scheme, const NetSnapshot& snap) {
    MessagePair msg;
    msg.system_text = prompt_template(scheme);
    switch (scheme) {
        case PromptScheme::MathL:
        case PromptScheme::NaturalL:
            msg.user_text = render_user_l(snap);
            break;
        case PromptScheme::GeneralG:
        case PromptScheme::GeneralGAggressive:
            msg.user_text = render_user_g(snap);
            break;
    }
    return msg;
}

}  // namespace ccsim
