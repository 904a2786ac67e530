#pragma once

namespace metapop {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;  // CSV/manifest schema version

}  // namespace metapop
