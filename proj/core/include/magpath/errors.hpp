#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace magpath {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampling node coincides with a registered singular point.
class SingularNodeError : public Error {
 public:
  using Error::Error;
};

/// An evaluator returned NaN or infinity away from its singular set.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Two wave functions (or a wave function and an operator) live on different grids.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Adaptive line quadrature did not reach its tolerance.
class QuadratureDivergenceError : public Error {
 public:
  using Error::Error;
};

/// Dense problem exceeds the configured matrix dimension cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Hermitian eigensolver reported failure.
class EigenFailureError : public Error {
 public:
  using Error::Error;
};

/// Path-integral quadrature would exceed its work cap.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& what, std::size_t suggested_slices)
      : Error(what), suggested_slices_(suggested_slices) {}

  /// Largest slice count estimated to fit the cap (at least 1).
  std::size_t suggested_slices() const noexcept { return suggested_slices_; }

 private:
  std::size_t suggested_slices_;
};

/// Box/gap schedule is not monotone or violates the phase-resolution bound.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario document.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace magpath
