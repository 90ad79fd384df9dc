#pragma once

// Tree-walking evaluator for PerfC. Profile mode runs each extrapolated loop at
// most `max_iterations` times and scales counters symbolically; exact mode
// runs everything fully with concrete values and is the brute-force oracle
// for the profile formulas.

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "perfscope/analysis.hpp"
#include "perfscope/runtime.hpp"
#include "perfscope/values.hpp"

namespace perfscope {

enum class RunMode { Profile, Exact };

struct RunOptions {
  RunMode mode = RunMode::Profile;
  std::int64_t max_iterations = 2;  // profile mode only
  std::vector<InputSpec> inputs;    // exact mode runs at the small values
  int recursion_limit = 10000;
};

struct BlockRef {
  int id = 0;
  TypeKind element = TypeKind::Double;
};

/// Runtime value. std::monostate is the unit value of void calls.
using Value = std::variant<std::monostate, std::int64_t, Num, TrackedFloat, BlockRef>;

ProfileResult run(const Program& prog, const TrackednessMap& map, const LoopAnalysis& loops, const RunOptions& options);
ProfileResult run(const AnalyzedProgram& analyzed, const RunOptions& options);

struct ExactMeasurement {
  std::int64_t size = 0;
  Rational flops;
  Rational peak_bytes;
  Rational comm_calls;
  Rational comm_bytes;
  Rational alloc_bytes;
};

/// Runs exact mode once per size of `input`, the other inputs held at their
/// small values.
std::vector<ExactMeasurement> run_exact_series(const AnalyzedProgram& analyzed, std::string_view input,
                                               const std::vector<std::int64_t>& sizes,
                                               const std::vector<InputSpec>& fixed = {});

/// Value of a counter Term that must be constant (exact-mode results).
Rational constant_count(const Term& t);

}  // namespace perfscope
