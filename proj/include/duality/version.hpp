#pragma once

namespace duality {

inline constexpr const char* version = "0.1.0";

}  // namespace duality
