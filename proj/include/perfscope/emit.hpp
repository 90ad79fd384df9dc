#pragma once

#include <string>

#include "perfscope/analysis.hpp"
#include "perfscope/ast.hpp"

namespace perfscope {

/// Rewrites the original source into its instrumented form: tracked
/// declarations become Num / Double / DynamicMem<T>, malloc becomes
/// perf_malloc<T>, extrapolated loops get LOOP(<trip>) ... ITERATION markers
/// and every function body is wrapped in ENTERFUNCTION / EXITFUNCTION.
/// Text outside the rewritten spans is copied byte for byte.
std::string emit_instrumented(const Program& prog, const TrackednessMap& map, const LoopAnalysis& loops);

}  // namespace perfscope
