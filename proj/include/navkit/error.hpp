#pragma once
#include <stdexcept>
#include <string>

namespace navkit {

// Bad user input (missing file, malformed flag value, unknown agent name).
// The CLI maps this to exit code 2; anything else escaping main is exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace navkit
