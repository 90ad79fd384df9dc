#include "perfscope/values.hpp"

#include <limits>

#include "perfscope/runtime.hpp"

namespace perfscope {

Num num_from_literal(std::int64_t c) { return Num{c, term_const(c), c, true}; }

Num num_input(std::string_view name, std::int64_t small, std::int64_t large) {
  if (small < 0 || large < small)
    throw Error(ErrorKind::InvalidInputConfiguration,
                "input '" + std::string(name) + "' needs 0 <= small <= large");
  return Num{small, term_var(name), large, true};
}

bool num_consistent(const Num& n, const Assignment& small_cfg, const Assignment& large_cfg) {
  if (!n.exact) return true;
  auto matches = [&](const Assignment& cfg, std::int64_t expected) {
    Rational v = evaluate(n.term, cfg);
    if (boost::multiprecision::denominator(v) != 1) return true;
    return v == Rational(expected);
  };
  return matches(small_cfg, n.small) && matches(large_cfg, n.large);
}

std::string_view to_string(IntOp op) {
  switch (op) {
    case IntOp::Add: return "+";
    case IntOp::Sub: return "-";
    case IntOp::Mul: return "*";
    case IntOp::Div: return "/";
    case IntOp::Mod: return "%";
  }
  return "?";
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

std::int64_t checked_int_op(IntOp op, std::int64_t a, std::int64_t b, SourceLoc loc) {
  std::int64_t out = 0;
  auto overflow = [&] {
    return Error(ErrorKind::Overflow,
                 "64-bit overflow in " + std::to_string(a) + " " + std::string(to_string(op)) + " " + std::to_string(b),
                 loc);
  };
  switch (op) {
    case IntOp::Add:
      if (__builtin_add_overflow(a, b, &out)) throw overflow();
      return out;
    case IntOp::Sub:
      if (__builtin_sub_overflow(a, b, &out)) throw overflow();
      return out;
    case IntOp::Mul:
      if (__builtin_mul_overflow(a, b, &out)) throw overflow();
      return out;
    case IntOp::Div:
    case IntOp::Mod:
      if (b == 0) throw Error(ErrorKind::Arithmetic, op == IntOp::Div ? "division by zero" : "modulo by zero", loc);
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) throw overflow();
      return op == IntOp::Div ? a / b : a % b;
  }
  return out;
}

bool compare_ints(CmpOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
  }
  return false;
}

Num num_binop(IntOp op, const Num& a, const Num& b, const WarningSink& warn, SourceLoc loc) {
  if ((op == IntOp::Div || op == IntOp::Mod) && (b.small == 0 || b.large == 0))
    throw Error(ErrorKind::Arithmetic,
                std::string(op == IntOp::Div ? "division" : "modulo") + " by zero (small " + std::to_string(b.small) +
                    ", large " + std::to_string(b.large) + ")",
                loc);

  Num out;
  out.small = checked_int_op(op, a.small, b.small, loc);
  out.large = checked_int_op(op, a.large, b.large, loc);
  out.exact = a.exact && b.exact;
  switch (op) {
    case IntOp::Add: out.term = a.term + b.term; break;
    case IntOp::Sub: out.term = a.term - b.term; break;
    case IntOp::Mul: out.term = a.term * b.term; break;
    case IntOp::Div:
      if (b.term.is_zero())
        throw Error(ErrorKind::DivisionByZero, "division by a term that is identically zero", loc);
      out.term = a.term / b.term;
      if (a.small % b.small != 0 || a.large % b.large != 0) {
        out.exact = false;
        if (warn)
          warn({WarningKind::Truncation, loc,
                "integer division truncates; term " + format(out.term) + " is the exact quotient"});
      }
      break;
    case IntOp::Mod:
      out.term = term_const(out.small);
      out.exact = false;
      if (warn) warn({WarningKind::LossyTerm, loc, "modulo has no symbolic form; using the small value as a constant"});
      break;
  }
  return out;
}

bool num_compare(CmpOp op, const Num& a, const Num& b, const WarningSink& warn, SourceLoc loc) {
  if (a.large == b.large && a.small != b.small && warn)
    warn({WarningKind::ComparisonAmbiguity, loc,
          "large values tie at " + std::to_string(a.large) + " but small values differ (" + std::to_string(a.small) +
              " vs " + std::to_string(b.small) + ")"});
  return compare_ints(op, a.large, b.large);
}

TrackedFloat float_binop(FloatOp op, TrackedFloat a, TrackedFloat b, Context& ctx) {
  ctx.charge(CounterKey::flops(), Term(1));
  switch (op) {
    case FloatOp::Add: return {a.value + b.value};
    case FloatOp::Sub: return {a.value - b.value};
    case FloatOp::Mul: return {a.value * b.value};
    case FloatOp::Div: return {a.value / b.value};
  }
  return a;
}

bool float_compare(CmpOp op, TrackedFloat a, TrackedFloat b) {
  switch (op) {
    case CmpOp::Lt: return a.value < b.value;
    case CmpOp::Le: return a.value <= b.value;
    case CmpOp::Gt: return a.value > b.value;
    case CmpOp::Ge: return a.value >= b.value;
    case CmpOp::Eq: return a.value == b.value;
    case CmpOp::Ne: return a.value != b.value;
  }
  return false;
}

}  // namespace perfscope
