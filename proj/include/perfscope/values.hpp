#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

#include "perfscope/diagnostics.hpp"
#include "perfscope/term.hpp"

namespace perfscope {

class Context;

using WarningSink = std::function<void(Warning)>;

/// Tracked integer: the concrete value under the small configuration, its
/// symbolic term, and the interpolated value under the large configuration.
///
/// `exact` is cleared once truncating division or modulo made `term` diverge
/// from the concrete components; consistency checks skip such values.
struct Num {
  std::int64_t small = 0;
  Term term;
  std::int64_t large = 0;
  bool exact = true;
};

Num num_from_literal(std::int64_t c);
Num num_input(std::string_view name, std::int64_t small, std::int64_t large);

/// term evaluated at the small/large assignments equals small/large. Values
/// with `exact` cleared, or whose term does not evaluate to an integer, pass.
bool num_consistent(const Num& n, const Assignment& small_cfg, const Assignment& large_cfg);

enum class IntOp { Add, Sub, Mul, Div, Mod };
enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(IntOp op);
std::string_view to_string(CmpOp op);

// Overflow-checked 64-bit arithmetic; division truncates toward zero.
std::int64_t checked_int_op(IntOp op, std::int64_t a, std::int64_t b, SourceLoc loc = {});
bool compare_ints(CmpOp op, std::int64_t a, std::int64_t b);

Num num_binop(IntOp op, const Num& a, const Num& b, const WarningSink& warn = {}, SourceLoc loc = {});

/// Orders by the large components. Records a comparison-ambiguity warning when
/// the large components tie but the small ones differ.
bool num_compare(CmpOp op, const Num& a, const Num& b, const WarningSink& warn = {}, SourceLoc loc = {});

struct TrackedFloat {
  double value = 0.0;
};

enum class FloatOp { Add, Sub, Mul, Div };

/// IEEE arithmetic that charges one FLOP to `ctx`.
TrackedFloat float_binop(FloatOp op, TrackedFloat a, TrackedFloat b, Context& ctx);
bool float_compare(CmpOp op, TrackedFloat a, TrackedFloat b);

}  // namespace perfscope
