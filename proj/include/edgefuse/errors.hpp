#pragma once

#include <stdexcept>

namespace edgefuse {

// Malformed user input: scenario files, cost profiles, map files, CLI values.
// The CLI maps this to exit code 2; any other exception is internal (exit 3).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgefuse
