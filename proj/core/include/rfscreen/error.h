#pragma once

#include <stdexcept>
#include <string>

namespace rfscreen {

// Bad input: malformed data, out-of-range parameters, violated preconditions.
// The command-line tool maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Environment failures such as unreadable or unwritable files (exit status 1).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rfscreen
