#pragma once

namespace sglv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sglv
