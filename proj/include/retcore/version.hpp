#pragma once

namespace retcore {

inline constexpr const char* kVersion = "0.1.0";

// Version of the .rvec weight container format.
inline constexpr unsigned kWeightsFormatVersion = 1;

}  // namespace retcore
