#pragma once

namespace spinlab {
inline constexpr const char* kVersion = "0.1.0";
}
