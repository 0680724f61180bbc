#pragma once

#include <string>
#include <vector>

namespace fsec::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one fsec invocation. Returns 0 on success, 1 on a module error, 2 on
// a usage error. Arguments exclude the program name.
int dispatch(const std::vector<std::string>& args);

}  // namespace fsec::cli
