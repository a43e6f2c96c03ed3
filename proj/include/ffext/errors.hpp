#pragma once

#include <stdexcept>

namespace ffext {

/// Raised when a requested object would exceed the configured memory budget.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an internal cross-check fails; signals a bug, not bad input.
struct consistency_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace ffext
