#pragma once

#include <stdexcept>
#include <string>

namespace tierplan {

// Base class for all planner errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, out-of-range arguments, schema violations.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A requested configuration cannot run (no feasible batch size, zero
// context slots, ...). Carries the binding constraint name. Exit code 3.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, std::string binding_constraint)
      : Error(what), binding_constraint_(std::move(binding_constraint)) {}

  const std::string& binding_constraint() const { return binding_constraint_; }

 private:
  std::string binding_constraint_;
};

}  // namespace tierplan
