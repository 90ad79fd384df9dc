#include <bit>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "perfscope/runtime.hpp"
#include "perfscope/values.hpp"
#include "test_support.hpp"

using namespace perfscope;
using perfscope::testing::TermGen;
using perfscope::testing::tv;

namespace {

void check_triple(const Num& x, std::int64_t small, const Term& term, std::int64_t large) {
  CHECK(x.small == small);
  CHECK(x.term == term);
  CHECK(x.large == large);
}

const Num kN = num_input("n", 8, 256);
const Num kM = num_input("m", 4, 128);

struct Collector {
  std::vector<Warning> warnings;
  WarningSink sink() {
    return [this](Warning w) { warnings.push_back(std::move(w)); };
  }
};

}  // namespace

TEST_CASE("literals and inputs") {
  check_triple(num_from_literal(0), 0, Term(), 0);
  check_triple(num_from_literal(128), 128, term_const(128), 128);
  check_triple(num_from_literal(-3), -3, term_const(-3), -3);
  check_triple(kN, 8, tv("n"), 256);
  check_triple(kM, 4, tv("m"), 128);
  check_triple(num_input("k", 5, 5), 5, tv("k"), 5);
  CHECK_THROWS_AS(num_input("n", 8, 4), Error);
  CHECK_THROWS_AS(num_input("n", -1, 4), Error);
}

TEST_CASE("tracked integer arithmetic") {
  Num nm = num_binop(IntOp::Mul, kN, kM);
  check_triple(nm, 32, tv("n") * tv("m"), 32768);
  check_triple(num_binop(IntOp::Add, kN, num_from_literal(0)), 8, tv("n"), 256);
  Num back = num_binop(IntOp::Div, nm, kM);
  check_triple(back, 8, tv("n"), 256);
  CHECK(back.exact);
  check_triple(num_binop(IntOp::Sub, kN, kM), 4, tv("n") - tv("m"), 128);
}

TEST_CASE("division and modulo edge cases") {
  Collector c;
  Num q = num_binop(IntOp::Div, kN, num_from_literal(3), c.sink(), {4, 2});
  check_triple(q, 2, tv("n") / 3, 85);
  CHECK(!q.exact);
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].kind == WarningKind::Truncation);
  CHECK(c.warnings[0].loc == SourceLoc{4, 2});

  c.warnings.clear();
  Num r = num_binop(IntOp::Mod, kN, num_from_literal(3), c.sink());
  check_triple(r, 2, term_const(2), 1);
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].kind == WarningKind::LossyTerm);

  for (IntOp op : {IntOp::Div, IntOp::Mod}) {
    try {
      num_binop(op, kN, num_from_literal(0), {}, {3, 7});
      FAIL("expected a division error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Arithmetic);
      CHECK(e.loc() == SourceLoc{3, 7});
    }
  }
  // Zero only under the large configuration is still an error.
  Num odd{1, tv("z"), 0, true};
  CHECK_THROWS_AS(num_binop(IntOp::Div, kN, odd), Error);

  Num huge = num_from_literal(std::numeric_limits<std::int64_t>::max());
  try {
    num_binop(IntOp::Add, huge, num_from_literal(1));
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
  }
  Num big{1, tv("n"), std::int64_t{1} << 40, true};
  CHECK_THROWS_AS(num_binop(IntOp::Mul, big, big), Error);
}

TEST_CASE("comparisons use the large values") {
  CHECK(num_compare(CmpOp::Gt, kN, num_from_literal(128)));
  CHECK(num_compare(CmpOp::Eq, kN, kN));
  CHECK(num_compare(CmpOp::Lt, kM, kN));
  CHECK(!num_compare(CmpOp::Gt, kM, num_from_literal(128)));

  Collector c;
  Num a{3, tv("a"), 10, true}, b{5, tv("b"), 10, true};
  CHECK(num_compare(CmpOp::Eq, a, b, c.sink(), {2, 5}));
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].kind == WarningKind::ComparisonAmbiguity);
  c.warnings.clear();
  CHECK(!num_compare(CmpOp::Lt, a, a, c.sink()));
  CHECK(c.warnings.empty());
}

TEST_CASE("float arithmetic charges one FLOP per operation") {
  Context ctx({});
  CHECK(float_binop(FloatOp::Add, {0.0}, {0.0}, ctx).value == 0.0);
  CHECK(ctx.counters().get(CounterKey::flops()) == term_const(1));
  CHECK(float_binop(FloatOp::Mul, {2.0}, {3.0}, ctx).value == 6.0);
  CHECK(ctx.counters().get(CounterKey::flops()) == term_const(2));
  CHECK(std::isinf(float_binop(FloatOp::Div, {1.0}, {0.0}, ctx).value));

  CHECK(float_compare(CmpOp::Lt, {1.0}, {2.0}));
  CHECK(!float_compare(CmpOp::Eq, {NAN}, {NAN}));
  CHECK(float_compare(CmpOp::Ge, {2.0}, {2.0}));
  CHECK(ctx.counters().get(CounterKey::flops()) == term_const(3));
}

namespace {

Num random_num(TermGen& gen, int depth) {
  if (depth == 0 || gen.uniform(0, 3) == 0) {
    switch (gen.uniform(0, 2)) {
      case 0: return kN;
      case 1: return kM;
      default: return num_from_literal(gen.uniform(-5, 9));
    }
  }
  Num a = random_num(gen, depth - 1);
  Num b = random_num(gen, depth - 1);
  static const IntOp ops[] = {IntOp::Add, IntOp::Sub, IntOp::Mul, IntOp::Div};
  return num_binop(ops[gen.uniform(0, 3)], a, b);
}

}  // namespace

TEST_CASE("property: triple consistency") {
  TermGen gen(314159);
  const Assignment small{{"n", 8}, {"m", 4}};
  const Assignment large{{"n", 256}, {"m", 128}};
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Num x;
    try {
      x = random_num(gen, 4);
    } catch (const Error&) {
      continue;  // division by zero or overflow in a random tree
    }
    ++checked;
    if (!x.exact) continue;
    Rational s = evaluate(x.term, small), l = evaluate(x.term, large);
    CHECK(s == x.small);
    CHECK(l == x.large);
    CHECK(num_consistent(x, small, large));
  }
  CHECK(checked > 700);
}

TEST_CASE("property: comparison depends only on large components") {
  TermGen gen(27);
  static const CmpOp ops[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne};
  for (int i = 0; i < 1000; ++i) {
    Num a{gen.uniform(-50, 50), gen.term(), gen.uniform(-50, 50), true};
    Num b{gen.uniform(-50, 50), gen.term(), gen.uniform(-50, 50), true};
    Num a2{gen.uniform(-50, 50), gen.term(), a.large, true};
    CmpOp op = ops[gen.uniform(0, 5)];
    CHECK(num_compare(op, a, b) == num_compare(op, a2, b));
    CHECK(num_compare(op, a, b) == compare_ints(op, a.large, b.large));
  }
}

TEST_CASE("property: tracking never perturbs float results") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  Context ctx({});
  double plain = 1.0;
  TrackedFloat tracked{1.0};
  const int k = 1000;
  for (int i = 0; i < k; ++i) {
    double x = dist(rng);
    int op = static_cast<int>(rng() % 4);
    switch (op) {
      case 0: plain = plain + x; break;
      case 1: plain = plain - x; break;
      case 2: plain = plain * x; break;
      default: plain = plain / x; break;
    }
    tracked = float_binop(static_cast<FloatOp>(op), tracked, {x}, ctx);
    REQUIRE(std::bit_cast<std::uint64_t>(plain) == std::bit_cast<std::uint64_t>(tracked.value));
  }
  CHECK(ctx.counters().get(CounterKey::flops()) == term_const(k));
}
