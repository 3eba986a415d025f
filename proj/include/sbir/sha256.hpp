#pragma once

#include <string>
#include <string_view>

namespace sbir {

// Hex digest of the SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

}  // namespace sbir
