#pragma once

#include <string_view>

namespace cohortmn {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kToolName = "cohortmn";

// Identifier recorded in run metadata so results can be tied to the
// exact random-number machinery that produced them.
inline constexpr std::string_view kRngId = "xoshiro256++/splitmix64-streams";

}  // namespace cohortmn
