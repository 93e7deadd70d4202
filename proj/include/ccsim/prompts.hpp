#pragma once

#include <string>

#include "ccsim/snapshot.hpp"

namespace ccsim {

enum class PromptScheme { MathL, NaturalL, GeneralG, GeneralGAggressive };

PromptScheme prompt_scheme_from_string(const std::string& s);
std::string to_string(PromptScheme s);

struct MessagePair {
    std::string system_text;
    std::string user_text;
};

/// System text is the scheme's shipped template verbatim; the user text
/// injects snapshot values with pinned formatting (bytes as integers,
/// seconds with 6 decimals, Mb/s with 4 decimals) so replay keys are stable.
MessagePair render_prompt(PromptScheme scheme, const NetSnapshot& snap);

const char* prompt_template(PromptScheme scheme);

}  // namespace ccsim
