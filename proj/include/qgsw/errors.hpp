#pragma once

#include <stdexcept>
#include <string>

namespace qgsw {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (z <= 0 for K_n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Argument inside the domain but outside the range an algorithm supports.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent argument (bad node count, mismatched sizes, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated at its singular point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Contour with coincident nodes, wrong orientation or self-intersection.
class DegenerateContourError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point too close to the boundary for the quadrature to be trusted.
class AccuracyRefusal : public Error {
 public:
  using Error::Error;
};

}  // namespace qgsw
