#pragma once

namespace shapval {

inline constexpr const char* kArtifactName = "shapval";
inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace shapval
