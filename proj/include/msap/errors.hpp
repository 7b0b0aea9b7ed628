#pragma once

#include <stdexcept>
#include <string>

namespace msap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: unknown names, violated preconditions on parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The scattering coefficient evaluated to a non-positive value.
class InvalidMediaError : public Error {
 public:
  InvalidMediaError(const std::string& what, double x, double y)
      : Error(what), x_(x), y_(y) {}
  double x() const { return x_; }
  double y() const { return y_; }

 private:
  double x_;
  double y_;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// A linear solve failed or did not reach the requested residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = -1.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace msap
