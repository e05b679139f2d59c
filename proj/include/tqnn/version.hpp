#pragma once

namespace tqnn {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kVersionString = "tqnnsim 0.1.0";

} // namespace tqnn
