#pragma once

namespace aeromix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aeromix
