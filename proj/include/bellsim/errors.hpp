#pragma once

#include <stdexcept>
#include <string>

namespace bellsim {

// Malformed configs, unreadable inputs, unknown model names.
// The CLI maps this to exit code 64.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated preconditions: invalid mode/model combinations, empty cells,
// missing hidden data. The CLI maps this to exit code 65.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bellsim
