#pragma once

#define ZEITNOT_VERSION_MAJOR 0
#define ZEITNOT_VERSION_MINOR 1
#define ZEITNOT_VERSION_PATCH 0

namespace zeitnot {

inline constexpr const char* version_string() { return "0.1.0"; }

} // namespace zeitnot
