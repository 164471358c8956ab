#pragma once

namespace spurprobe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spurprobe
