#pragma once

#include <stdexcept>
#include <string>

namespace nmmc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input files that cannot be read or parsed.
class IoError : public Error {
public:
  using Error::Error;
};

/// Arguments that violate a documented precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Iterative numerical routines that fail to converge.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

}  // namespace nmmc
