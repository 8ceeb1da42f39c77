#pragma once

namespace modsym {
inline constexpr const char* kVersion = "0.1.0";
}
