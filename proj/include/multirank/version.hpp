#pragma once

namespace multirank {

inline constexpr const char* kVersion = "multirank 0.1.0";

}  // namespace multirank
