#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace perfscope {

struct SourceLoc {
  int line = 0;
  int column = 0;

  bool valid() const { return line > 0; }
  friend auto operator<=>(const SourceLoc&, const SourceLoc&) = default;
};

std::string to_string(SourceLoc loc);

enum class ErrorKind {
  InvalidVariable,
  DivisionByZero,
  UnboundVariable,
  EvaluationSingularity,
  InvalidInputConfiguration,
  Overflow,
  Arithmetic,
  Configuration,
  NegativeTrip,
  InternalInvariant,
  Allocation,
  MemoryMisuse,
  OutOfBounds,
  UseAfterFree,
  Uninitialized,
  RecursionLimit,
};

std::string_view to_string(ErrorKind kind);

/// Runtime or API misuse error. Carries a source location when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, SourceLoc loc = {})
      : std::runtime_error(message), kind_(kind), loc_(loc) {}

  ErrorKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  ErrorKind kind_;
  SourceLoc loc_;
};

enum class WarningKind {
  ComparisonAmbiguity,
  BranchDivergence,
  Truncation,
  LossyTerm,
  ZeroIterations,
};

std::string_view to_string(WarningKind kind);

struct Warning {
  WarningKind kind;
  SourceLoc loc;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

enum class Severity { Error, Warning, Note };

/// A frontend finding tied to a position in a PerfC source file.
struct Diagnostic {
  SourceLoc loc;
  Severity severity = Severity::Error;
  std::string message;
};

/// Renders "file:line:col: severity: message".
std::string format_diagnostic(std::string_view file, const Diagnostic& diag);

/// Thrown when the frontend rejects a program.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> diags);

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

}  // namespace perfscope
