#pragma once

#include <stdexcept>
#include <string>

namespace shapval {

// Invalid caller input: malformed records, unknown ids, bad configuration.
// Maps to process exit code 2 in the command line tool.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: diverging optimization, broken telescoping sums.
// Maps to process exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure: unreadable or unwritable paths. Maps to exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shapval
