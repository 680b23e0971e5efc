#pragma once

#include <stdexcept>

namespace nudgesim {

// Bad input data or an unreadable file. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter values. The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nudgesim
