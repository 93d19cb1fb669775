#pragma once

namespace wes {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace wes
