#pragma once

#include <stdexcept>
#include <string>

namespace qsieve {

// Error categories map onto the CLI exit codes: validation -> 2,
// numeric degradation (under --strict) -> 3, I/O -> 4.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qsieve
