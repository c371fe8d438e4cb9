#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace strippack {

// Caller broke a documented precondition (out-of-range footprint,
// density queried mid-episode, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A placement or action that the current bin state does not admit.
class InfeasibleAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed instance / log / config input. Carries the 1-based line and the
// offending field name when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::string field = {})
      : std::runtime_error(format(what, line, field)), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& what, std::size_t line, const std::string& field) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "field '" + field + "': ";
    return out + what;
  }

  std::size_t line_;
  std::string field_;
};

}  // namespace strippack
