#pragma once

namespace hankelcp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hankelcp
