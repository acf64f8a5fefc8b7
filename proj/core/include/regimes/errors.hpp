#pragma once

#include <stdexcept>
#include <string>

namespace regimes {

// Error categories map onto the CLI exit-code contract:
// validation/parse -> 2, numerical failure -> 3, configuration -> 4.

class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regimes
