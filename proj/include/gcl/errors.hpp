#pragma once

#include <stdexcept>
#include <string>

namespace gcl {

// Malformed files, bad indices, inconsistent user input. CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite math is required. CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcl
