#pragma once

namespace homsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace homsim
