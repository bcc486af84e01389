#pragma once

namespace iumix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace iumix
