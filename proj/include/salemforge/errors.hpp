#pragma once

#include <stdexcept>
#include <string>

namespace salemforge {

// Precondition or input-shape violation. The CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Filesystem / serialization failure. The CLI maps this to exit code 4.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace salemforge
