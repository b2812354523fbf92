#pragma once

#include <stdexcept>
#include <string>

namespace ehpf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument violates a documented precondition (bad value, bad shape).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A schedule handed to an operation that requires feasibility is infeasible.
class InfeasibleInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Objective is identically -inf (a user can never receive a bit).
class DegenerateProblem : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// improvement_pct against a zero or non-finite baseline.
class UndefinedBaseline : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ehpf
