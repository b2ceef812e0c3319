#pragma once

namespace eigcoint {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eigcoint
