#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

namespace sociallearn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitModel = 3;

// Entry point shared by the executable and the in-process tests. Primary
// documents go to `out` unless --out names a file; error records go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view data);

}  // namespace sociallearn::cli
