#pragma once

#include <stdexcept>
#include <string>

namespace rotjac {

/// Iterative routine failed to reach its convergence tolerance.
struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Input lies outside the domain where the operation is defined
/// (zero matrix, parallel columns, invalid rotation, ...).
struct DegenerateInput : std::runtime_error {
  explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

/// The singular-value configuration makes the requested derivative
/// ill-defined or numerically meaningless.
struct NearDegenerateSpectrum : std::runtime_error {
  explicit NearDegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

/// Relative rotation angle too close to 0 or pi for the geodesic gradient.
struct AngleSingularity : std::runtime_error {
  explicit AngleSingularity(const std::string& what) : std::runtime_error(what) {}
};

/// Scalar argument outside the formula's domain.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rotjac
