#pragma once

#include <stdexcept>
#include <string>

namespace fracvar {

// Numerical failure: blow-up, non-convergence, degenerate configuration
// detected at run time. Usage and parse errors use the std:: logic_error
// family (std::invalid_argument, std::domain_error).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracvar
