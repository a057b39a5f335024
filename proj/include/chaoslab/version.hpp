#pragma once

namespace chaoslab {

inline constexpr const char* kVersion = "0.1.0";

}
