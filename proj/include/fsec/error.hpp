#pragma once

#include <stdexcept>
#include <string>

namespace fsec {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fsec
