#pragma once

// Static analyses over a resolved PerfC program: which declarations carry
// tracked types, and how each loop is executed under profiling.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perfscope/ast.hpp"
#include "perfscope/diagnostics.hpp"

namespace perfscope {

enum class Marker { Plain, TrackedInt, TrackedFloat, TrackedBlock };

std::string_view to_string(Marker m);

struct TrackednessMap {
  std::vector<Marker> decls;            // indexed by declaration id
  std::vector<bool> tracked_returns;    // indexed by function; int functions returning tracked values
  int passes = 0;                       // propagation passes until the fixpoint

  Marker marker(int decl) const { return decls.at(static_cast<std::size_t>(decl)); }
  /// Marker of the first declaration of `name` in `function`.
  Marker lookup(const Program& prog, std::string_view function, std::string_view name) const;

  friend bool operator==(const TrackednessMap& a, const TrackednessMap& b) {
    return a.decls == b.decls && a.tracked_returns == b.tracked_returns;
  }
};

/// Monotone fixpoint: main's int parameters, doubles and pointers are seeded
/// tracked; int declarations assigned anything tracked, parameters receiving
/// tracked arguments and functions returning tracked values follow.
TrackednessMap analyze_trackedness(const Program& prog);
/// Same, starting from an existing map's markers as extra seeds.
TrackednessMap analyze_trackedness(const Program& prog, const TrackednessMap& seed);

/// True for an int-typed expression whose value derives from a tracked int.
bool is_tracked(const Program& prog, const TrackednessMap& map, const Expr& e);

enum class LoopMode { Exact, Trip };

struct LoopAnnotation {
  int loop_id = -1;
  LoopMode mode = LoopMode::Exact;
  ExprPtr trip;  // set for LoopMode::Trip
  bool from_pragma = false;
  SourceLoc loc;
};

struct LoopAnalysis {
  std::vector<LoopAnnotation> loops;  // indexed by loop id
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
  const LoopAnnotation& at(int loop_id) const { return loops.at(static_cast<std::size_t>(loop_id)); }
};

/// Canonical for loops with a tracked bound get a trip-count expression;
/// untracked loops run exactly; "#perf iterations(expr)" overrides both.
LoopAnalysis annotate_loops(const Program& prog, const TrackednessMap& map);

/// Source text for an expression; synthetic nodes are printed.
std::string render_expr(const Program& prog, const Expr& e);

/// Everything the interpreter and the emitter need from the frontend.
struct AnalyzedProgram {
  Program program;
  TrackednessMap trackedness;
  LoopAnalysis loops;
};

/// parse + analyze_trackedness + annotate_loops. Throws DiagnosticError when
/// any stage reports an error.
AnalyzedProgram analyze_source(std::string source);

}  // namespace perfscope
