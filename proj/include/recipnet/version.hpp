#pragma once

namespace recipnet {

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace recipnet
