#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conform {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A point or interval outside the gain pair's domain, or a coefficient
// violating a sign requirement (p <= 0, a == 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericsError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

class IntegratorError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

class DegenerateProblem : public Error {
 public:
  DegenerateProblem(const std::string& what, double determinant)
      : Error(what), determinant_(determinant) {}
  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace conform
