#pragma once

#include <stdexcept>
#include <string>

namespace lclt {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Measure file syntax is broken (non-numeric tokens, missing header lines).
struct ParseError : Error { using Error::Error; };
// A well-formed file describes an invalid measure (mass != 1, negative
// probability, point outside the steplength ball, wrong coordinate count).
struct InvariantError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SingularCovariance : Error { using Error::Error; };
struct DegenerateHull : Error { using Error::Error; };
struct NotInterior : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct ResourceLimit : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
// A cell excluded from the weighted error still has to satisfy the
// Gaussian tail bound; this signals that it did not.
struct BoundViolation : Error { using Error::Error; };
// Bad sweep/CLI configuration (maps to exit code 2).
struct ConfigError : Error { using Error::Error; };

}  // namespace lclt
