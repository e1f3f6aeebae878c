#pragma once

#include <stdexcept>
#include <string>

namespace cantorlab {

// Exit-code contract used by the CLI: 0 ok, 1 invariant failure,
// 2 config error, 3 resource refusal.

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct invariant_error : std::runtime_error {
  explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an exact/exhaustive routine would exceed its cost cap.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cantorlab
