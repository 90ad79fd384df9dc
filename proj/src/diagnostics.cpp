#include "perfscope/diagnostics.hpp"

namespace perfscope {

std::string to_string(SourceLoc loc) { return std::to_string(loc.line) + ":" + std::to_string(loc.column); }

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidVariable: return "invalid-variable";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::UnboundVariable: return "unbound-variable";
    case ErrorKind::EvaluationSingularity: return "evaluation-singularity";
    case ErrorKind::InvalidInputConfiguration: return "invalid-input-configuration";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Arithmetic: return "arithmetic";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::NegativeTrip: return "negative-trip";
    case ErrorKind::InternalInvariant: return "internal-invariant";
    case ErrorKind::Allocation: return "allocation";
    case ErrorKind::MemoryMisuse: return "memory-misuse";
    case ErrorKind::OutOfBounds: return "out-of-bounds";
    case ErrorKind::UseAfterFree: return "use-after-free";
    case ErrorKind::Uninitialized: return "uninitialized";
    case ErrorKind::RecursionLimit: return "recursion-limit";
  }
  return "error";
}

std::string_view to_string(WarningKind kind) {
  switch (kind) {
    case WarningKind::ComparisonAmbiguity: return "comparison-ambiguity";
    case WarningKind::BranchDivergence: return "branch-divergence";
    case WarningKind::Truncation: return "truncation";
    case WarningKind::LossyTerm: return "lossy-term";
    case WarningKind::ZeroIterations: return "zero-iterations";
  }
  return "warning";
}

std::string format_diagnostic(std::string_view file, const Diagnostic& diag) {
  std::string_view severity = diag.severity == Severity::Error ? "error"
                              : diag.severity == Severity::Warning ? "warning"
                                                                   : "note";
  std::string out(file);
  if (diag.loc.valid()) out += ":" + to_string(diag.loc);
  out += ": ";
  out += severity;
  out += ": " + diag.message;
  return out;
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diags) {
  if (diags.empty()) return "invalid program";
  return to_string(diags.front().loc) + ": " + diags.front().message;
}

}  // namespace

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}

}  // namespace perfscope
