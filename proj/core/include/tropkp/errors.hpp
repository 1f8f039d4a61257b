#pragma once

#include <stdexcept>
#include <string>

namespace tropkp {

// Malformed or invariant-violating input. `where` names the offending
// element (an id or a JSON field path).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// A numerical series could not be truncated to the requested tolerance,
// or an evaluation landed on a zero of the function being divided by.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two routes that must agree did not. Always indicates a bug.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tropkp
