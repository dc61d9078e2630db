#pragma once

#include <stdexcept>
#include <string>

namespace hcl {

// Every comparison against zero in the library goes through one of these.
struct Tolerances {
  double membership = 1e-9;   // relative margin band for Interior/Boundary/Outside
  double zero_floor = 1e-10;  // matrix norms below this are treated as the zero matrix
  double orthonormal = 1e-12; // Plane basis check
  double jacobi = 1e-13;      // off-diagonal stopping ratio for eig_sym
  double hyperbolic = 1e-6;   // |Im root| / (1 + |root|) accepted as real
};

inline constexpr Tolerances kTol{};

inline constexpr int kSchemaVersion = 1;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, bad dimensions, invalid configuration. CLI exit code 3.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Iteration budget exhausted or an ill-conditioned computation. CLI exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but violates a mathematical precondition
/// (non-hyperbolic polynomial, non-elliptic cone passed to the solver).
class SemanticError : public Error {
 public:
  using Error::Error;
};

}  // namespace hcl
