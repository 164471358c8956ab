#pragma once

#include <stdexcept>
#include <string>

namespace spurprobe {

// Invalid input, bad file, contract violation by the caller. The CLI maps
// these to exit code 1; anything else escaping a command is exit code 2.
struct UserError : std::runtime_error {
  explicit UserError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spurprobe
