#pragma once

#include <string>
#include <string_view>

namespace mirrorfix::app {

/// Hex digest of the SHA-256 of the given bytes.
std::string sha256_hex(std::string_view data);

} // namespace mirrorfix::app
