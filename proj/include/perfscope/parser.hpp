#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perfscope/ast.hpp"
#include "perfscope/diagnostics.hpp"

namespace perfscope {

struct ParseOutcome {
  std::optional<Program> program;  // set iff there are no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

/// Parses and name-resolves a PerfC translation unit.
ParseOutcome parse_program(std::string source);

/// As parse_program, but throws DiagnosticError on any error.
Program parse(std::string source);

}  // namespace perfscope
