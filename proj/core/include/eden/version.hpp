#pragma once

#define EDEN_VERSION "1.0.0"

namespace eden {
inline constexpr const char* kVersion = EDEN_VERSION;
// PRNG identity recorded in every run manifest; bump if the stream changes.
inline constexpr const char* kRngName = "splitmix64";
inline constexpr int kRngVersion = 1;
}  // namespace eden
