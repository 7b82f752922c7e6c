#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaah {

/// Base of every error raised by the library. `module()` names the
/// subsystem that raised it so front-ends can report it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// An input lies outside the domain of the operation (|a| >= 1, n out of
/// range, zero vector, mismatched grids, ...).
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericFailure : public Error {
 public:
  NumericFailure(std::string module, const std::string& what,
                 double achieved_error = 0.0)
      : Error(std::move(module), what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Time integration became unstable (norm grew past its bound).
class InstabilityError : public NumericFailure {
 public:
  InstabilityError(std::string module, const std::string& what,
                   std::size_t step)
      : NumericFailure(std::move(module), what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A converged resonance pole lies in the upper half plane.
class PrescriptionViolation : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace gaah
