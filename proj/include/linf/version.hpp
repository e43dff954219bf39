#pragma once

namespace linf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace linf
