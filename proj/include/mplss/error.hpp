#pragma once

#include <stdexcept>
#include <string>

namespace mplss {

// Base of every library error. code() is a stable machine-readable tag.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* code() const noexcept { return "error"; }
};

// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "domain"; }
};

class PoleProximityError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* code() const noexcept override { return "pole_proximity"; }
};

// Kernel requested at a point where it is singular (e.g. beta at x1 == x2).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* code() const noexcept override { return "singularity"; }
};

// phi < 1: the single-bulk support guarantee does not hold.
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "unsupported_regime"; }
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "non_convergence"; }
};

// Iterate left the upper half-plane.
class BranchError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
  const char* code() const noexcept override { return "branch"; }
};

// Malformed textual input. row/column are 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}
  const char* code() const noexcept override { return "parse"; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace mplss
