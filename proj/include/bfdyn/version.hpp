#pragma once

namespace bfdyn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bfdyn
