#pragma once

#include <stdexcept>
#include <string>

namespace cdcv {

/// Bad input: unreadable files, malformed data, parameters outside their domain.
/// The command-line tool maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimation or numerical routine failed (non-convergence, singular matrix).
/// The command-line tool maps this to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdcv
