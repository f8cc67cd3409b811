#pragma once

namespace spoofguard {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spoofguard
