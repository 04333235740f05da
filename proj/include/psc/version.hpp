#pragma once

namespace psc {

inline constexpr const char* kVersion = "0.1.0";

// Identifier of the pseudo-random generator algorithm; recorded in every
// results sidecar so that archived tables state how their seeds were consumed.
inline constexpr const char* kRngAlgorithm = "splitmix64-v1";

}  // namespace psc
