#pragma once

namespace fluxepr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fluxepr
