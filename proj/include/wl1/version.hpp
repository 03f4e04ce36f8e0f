#pragma once

namespace wl1 {

inline constexpr const char* kVersion = "0.1.0";

// RNG scheme identifier; bump if the generator or stream layout changes,
// since recorded seeds would no longer reproduce old outputs.
inline constexpr const char* kRngScheme = "wl1-splitmix64-v1";

inline constexpr const char* kManifestSchema = "wl1-manifest-v1";

}  // namespace wl1
