#pragma once

namespace hybridmem {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hybridmem
