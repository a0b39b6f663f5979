#pragma once

#include <stdexcept>

namespace creek {

// Raised when a protocol invariant that should be unreachable is violated.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace creek
