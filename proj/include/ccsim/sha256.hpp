#pragma once

#include <cstdint>
#include <string>

namespace ccsim {

/// SHA-256 of `data`, returned as lowercase hex.
std::string sha256_hex(const std::string& data);

}  // namespace ccsim
