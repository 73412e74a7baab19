#pragma once

#include <stdexcept>
#include <string>

namespace tac {

// Base of the error taxonomy. The CLI maps subtypes to exit codes:
// configuration/validation -> 2, solver nonconvergence -> 3, I/O -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- configuration / input validation (exit 2)
struct ValidationError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct DomainViolation : Error { using Error::Error; };
struct InvalidExtents : Error { using Error::Error; };
struct EmptyRequiredPart : Error { using Error::Error; };
struct DegenerateCell : Error { using Error::Error; };
struct EllipticityViolation : Error { using Error::Error; };

// -- solver failures (exit 3)
struct SolverError : Error { using Error::Error; };
struct NoConvergence : SolverError { using SolverError::SolverError; };
struct LinearSolveFailure : SolverError { using SolverError::SolverError; };
struct NewtonNoConvergence : SolverError { using SolverError::SolverError; };
struct ActiveSetNoConvergence : SolverError { using SolverError::SolverError; };
struct FixedPointNoConvergence : SolverError { using SolverError::SolverError; };

// -- filesystem (exit 4)
struct IoError : Error { using Error::Error; };

}  // namespace tac
