#pragma once

namespace sabr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sabr
