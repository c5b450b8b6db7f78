#pragma once

#include <stdexcept>

namespace gqm {

/// Argument lies outside the deformed coordinate domain (1 + gamma*x must stay positive).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Caller broke a documented precondition (non-uniform grid, unnormalized state, ...).
struct contract_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Array too short for the requested stencil, or mismatched lengths.
struct size_error : std::length_error {
  using std::length_error::length_error;
};

/// Singular system, failed iteration, or NaN encountered during a computation.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gqm
