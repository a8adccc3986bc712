#pragma once

#include <stdexcept>
#include <string>

namespace panda {

// Bad arguments: dimension mismatches, out-of-range parameters, parse failures.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Fewer samples than an operation needs (e.g. a class with < 2 rows).
struct InsufficientData : InvalidInput {
  using InvalidInput::InvalidInput;
};

// A matrix required to be (numerically) positive definite is not.
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linear rule with beta = 0; its risk is undefined.
struct DegenerateRule : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An estimator's program has no solution consistent with its constraints.
struct EstimatorInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The iterative solver produced non-finite values.
struct SolverDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A synthetic model recipe produced an invalid covariance.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace panda
