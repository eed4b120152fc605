#pragma once

#include <stdexcept>
#include <string>

namespace stvol {

/// Input outside an operation's domain (negative scale, bad model, …).
/// The CLI maps this family to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller violated an interface contract (mismatched grids, wrong model).
class ContractError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed input file. Carries the 1-based line number and field name.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& field,
             const std::string& what)
      : DomainError(path + ":" + std::to_string(line) + ": field '" + field + "': " + what),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A numerical routine failed to reach its tolerance. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stvol
