#pragma once

namespace sociallearn {
inline constexpr const char* kVersion = "0.3.0";
}
