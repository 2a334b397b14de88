#pragma once

namespace mirrorfix {

inline constexpr const char* version = "0.1.0";

} // namespace mirrorfix
