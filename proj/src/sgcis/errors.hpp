#pragma once

#include <stdexcept>

namespace sgcis {

/// Raised when an adaptive scheme fails to reach its tolerance: quadrature
/// refinement exhausted, or integrator norm drift past its gate.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sgcis
