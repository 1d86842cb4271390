#pragma once

namespace symtop {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace symtop
