#pragma once

#include <stdexcept>
#include <string>

namespace dynex {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A run configuration or call precondition was violated.
class ConfigError : public Error {
public:
  using Error::Error;
};

class UnknownVariable : public Error {
public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class CycleError : public Error {
public:
  using Error::Error;
};

class NonFiniteDerivative : public Error {
public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
  using Error::Error;
};

class NotInvertible : public Error {
public:
  using Error::Error;
};

class InfeasibleAnchors : public Error {
public:
  using Error::Error;
};

class CalibrationError : public Error {
public:
  using Error::Error;
};

class NotConverged : public Error {
public:
  NotConverged(const std::string& what, std::string variable, double residual)
      : Error(what), variable_(std::move(variable)), residual_(residual) {}
  const std::string& variable() const noexcept { return variable_; }
  double residual() const noexcept { return residual_; }

private:
  std::string variable_;
  double residual_;
};

class KeyMismatch : public Error {
public:
  using Error::Error;
};

class UnknownColumn : public Error {
public:
  using Error::Error;
};

class SinkError : public Error {
public:
  using Error::Error;
};

} // namespace dynex
