#pragma once

namespace wq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wq
