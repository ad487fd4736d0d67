#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracequery {

// Base for every error the library raises. `code()` is the machine-readable
// tag surfaced by the HTTP API.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error("parse_error", message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownPredicate : public Error {
 public:
  explicit UnknownPredicate(const std::string& name, std::string field = {})
      : Error("unknown_predicate", "unknown predicate '" + name + "'"),
        name_(name),
        field_(std::move(field)) {}

  const std::string& name() const noexcept { return name_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string name_;
  std::string field_;
};

class StateBudgetExceeded : public Error {
 public:
  explicit StateBudgetExceeded(const std::string& message)
      : Error("state_budget_exceeded", message) {}
};

// Schema or semantic violation in user-supplied structured data.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error("invalid_request", field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class LibraryError : public Error {
 public:
  LibraryError(std::string code, const std::string& message, std::size_t line)
      : Error(std::move(code), "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message) : Error("not_found", message) {}
};

}  // namespace tracequery
