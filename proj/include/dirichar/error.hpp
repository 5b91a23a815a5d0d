#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dirichar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the open domain of an operation (boundary
/// simplex points, non-positive parameters, non-positive function values).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shapes or lengths of two arguments do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Conditional Dirichlet exponents do not sum to the marginal exponent.
class ConsistencyError : public Error {
 public:
  ConsistencyError(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampler accepted too few proposals for its envelope to be useful.
class EnvelopeError : public Error {
 public:
  using Error::Error;
};

/// A case contains missing cells where complete data is required.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration would exceed the supported number of missing cells.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An independence statistic is undefined (constant sample block).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dirichar
