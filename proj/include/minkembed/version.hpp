#pragma once

namespace minkembed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace minkembed
