#pragma once

namespace bellsim {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace bellsim
