#pragma once

namespace hompr {

inline constexpr const char* version = "1.0.0";

} // namespace hompr
