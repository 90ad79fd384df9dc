#include <functional>

#include "doctest.h"
#include "perfscope/emit.hpp"
#include "perfscope/parser.hpp"
#include "test_support.hpp"

using namespace perfscope;
using namespace perfscope::testing;

namespace {

const std::vector<std::string> kFixtures = {
    "execute.pc",      "nm.pc",        "straight.pc",  "single_loop.pc", "two_loops.pc",     "nest2.pc",   "nest3.pc",
    "alloc_loop.pc", "comm_loop.pc", "call_loop.pc", "stride.pc",      "while_pragma.pc", "two_alloc.pc", "loop_count.pc"};

void walk(const Stmt& s, const std::function<void(const Stmt&)>& on_stmt, const std::function<void(const Expr&)>& on_expr) {
  on_stmt(s);
  std::function<void(const Expr&)> expr = [&](const Expr& e) {
    on_expr(e);
    for (const auto& op : e.operands) expr(*op);
  };
  for (const ExprPtr* e : {&s.init, &s.target, &s.value, &s.cond})
    if (*e) expr(**e);
  for (const StmtPtr* c : {&s.then_branch, &s.else_branch, &s.for_init, &s.for_step, &s.body})
    if (*c) walk(**c, on_stmt, on_expr);
  for (const auto& inner : s.stmts) walk(*inner, on_stmt, on_expr);
}

std::vector<Diagnostic> diagnostics_of(const std::string& source) {
  try {
    analyze_source(source);
  } catch (const DiagnosticError& e) {
    return e.diagnostics();
  }
  return {};
}

bool mentions(const std::vector<Diagnostic>& diags, std::string_view text) {
  for (const auto& d : diags)
    if (d.message.find(text) != std::string::npos) return true;
  return false;
}

std::string wrap_main(const std::string& body) { return "int main(int n) {\n" + body + "\n  return 0;\n}\n"; }

}  // namespace

TEST_CASE("parse the running example") {
  Program p = parse(fixture("execute.pc"));
  REQUIRE(p.functions.size() == 2);
  CHECK(p.functions[0].name == "execute");
  CHECK(p.main().name == "main");
  int fors = 0, ifs = 0, mallocs = 0, frees = 0, allreduces = 0;
  walk(
      *p.functions[0].body,
      [&](const Stmt& s) {
        fors += s.kind == StmtKind::For;
        ifs += s.kind == StmtKind::If;
      },
      [&](const Expr& e) {
        mallocs += e.builtin == Builtin::Malloc;
        frees += e.builtin == Builtin::Free;
        allreduces += e.builtin == Builtin::MpiAllreduce;
      });
  CHECK(fors == 1);
  CHECK(ifs == 1);
  CHECK(mallocs == 1);
  CHECK(frees == 1);
  CHECK(allreduces == 1);
  CHECK(p.loop_count == 1);
}

TEST_CASE("minimal and rejected programs") {
  Program p = parse("int main(int n){return 0;}");
  CHECK(p.functions.size() == 1);
  CHECK(p.main().params.size() == 1);

  auto outcome = parse_program("int main(int n) { while(1) break; return 0; }");
  CHECK(!outcome.program);
  REQUIRE(!outcome.diagnostics.empty());
  CHECK(outcome.diagnostics[0].message.find("break") != std::string::npos);
  CHECK(outcome.diagnostics[0].loc == SourceLoc{1, 28});

  struct Case {
    std::string source;
    std::string expect;
  };
  const std::vector<Case> cases = {
      {wrap_main("  continue;"), "continue"},
      {wrap_main("  goto done;"), "goto"},
      {wrap_main("  double *p = malloc(8); p = p + 1;"), "pointer arithmetic"},
      {wrap_main("  double *p = malloc(8); double x = *p;"), "dereference"},
      {wrap_main("  int x = 1; int y = &x;"), "address-of"},
      {wrap_main("  int a[4];"), "array"},
      {wrap_main("  int x = undefined;"), "undeclared"},
      {"int f(int n) { return n; }", "main"},
      {"int main(double x) { return 0; }", "int"},
      {wrap_main("  int x = (double) n;"), "cast"},
      {wrap_main("  MPI_Send(&n, 1, MPI_CHAR, 0, 0, MPI_COMM_WORLD);"), "datatype"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.source);
    auto diags = parse_program(c.source).diagnostics;
    REQUIRE(!diags.empty());
    CHECK(mentions(diags, c.expect));
    CHECK(diags[0].loc.valid());
  }

  // Parsing recovers and reports more than one problem.
  auto many = parse_program(wrap_main("  int x = ;\n  int y = undefined;\n  break;"));
  CHECK(many.diagnostics.size() >= 2);

  auto d = diagnostics_of(wrap_main("  int x = ;"));
  REQUIRE(!d.empty());
  CHECK(format_diagnostic("t.pc", d[0]).rfind("t.pc:2:", 0) == 0);
}

TEST_CASE("trackedness on the running example") {
  AnalyzedProgram a = analyze_fixture("execute.pc");
  const auto& map = a.trackedness;
  CHECK(map.lookup(a.program, "execute", "n") == Marker::TrackedInt);
  CHECK(map.lookup(a.program, "execute", "field") == Marker::TrackedBlock);
  CHECK(map.lookup(a.program, "execute", "localSum") == Marker::TrackedFloat);
  CHECK(map.lookup(a.program, "execute", "globalSum") == Marker::TrackedFloat);
  CHECK(map.lookup(a.program, "execute", "i") == Marker::Plain);
  CHECK(map.lookup(a.program, "main", "n") == Marker::TrackedInt);
}

TEST_CASE("trackedness propagation") {
  Program plain = parse(wrap_main("  int a = 5;\n  int b = a;"));
  auto m1 = analyze_trackedness(plain);
  CHECK(m1.lookup(plain, "main", "a") == Marker::Plain);
  CHECK(m1.lookup(plain, "main", "b") == Marker::Plain);

  Program chain = parse(wrap_main("  int c = 1;\n  int a = n;\n  c = c + a;"));
  auto m2 = analyze_trackedness(chain);
  CHECK(m2.lookup(chain, "main", "a") == Marker::TrackedInt);
  CHECK(m2.lookup(chain, "main", "c") == Marker::TrackedInt);

  // Through parameters and return values.
  Program calls = parse(
      "int twice(int x) { return x * 2; }\n"
      "int id(int y) { return y; }\n"
      "int main(int n) { int t = twice(n); int u = id(3); return t + u; }\n");
  auto m3 = analyze_trackedness(calls);
  CHECK(m3.lookup(calls, "twice", "x") == Marker::TrackedInt);
  CHECK(m3.lookup(calls, "main", "t") == Marker::TrackedInt);
  CHECK(m3.lookup(calls, "id", "y") == Marker::Plain);
  CHECK(m3.lookup(calls, "main", "u") == Marker::Plain);
  CHECK(m3.tracked_returns[0]);
  CHECK(!m3.tracked_returns[1]);
}

TEST_CASE("property: fixpoint idempotence and monotonicity") {
  for (const auto& name : kFixtures) {
    CAPTURE(name);
    Program p = parse(fixture(name));
    auto map = analyze_trackedness(p);
    CHECK(analyze_trackedness(p, map) == map);

    // Seeding every int declaration never un-tracks anything.
    TrackednessMap seeded = map;
    for (std::size_t d = 0; d < seeded.decls.size(); ++d)
      if (p.decls[d].type == TypeKind::Int) seeded.decls[d] = Marker::TrackedInt;
    auto grown = analyze_trackedness(p, seeded);
    for (std::size_t d = 0; d < map.decls.size(); ++d)
      if (map.decls[d] != Marker::Plain) CHECK(grown.decls[d] == map.decls[d]);
  }
}

TEST_CASE("loop annotation") {
  AnalyzedProgram program = analyze_fixture("execute.pc");
  REQUIRE(program.loops.loops.size() == 1);
  CHECK(program.loops.at(0).mode == LoopMode::Trip);
  CHECK(render_expr(program.program, *program.loops.at(0).trip) == "n");

  AnalyzedProgram fixed = analyze_source(wrap_main("  double s = 0.0;\n  for (int i = 0; i < 10; ++i) s = s + 1.0;"));
  CHECK(fixed.loops.at(0).mode == LoopMode::Exact);

  AnalyzedProgram stride = analyze_fixture("stride.pc");
  CHECK(render_expr(stride.program, *stride.loops.at(0).trip) == "((n - 1) + 1) / 2");
  CHECK(render_expr(stride.program, *stride.loops.at(1).trip) == "((n - 3) + 3) / 4");

  AnalyzedProgram start = analyze_source(wrap_main("  double s = 0.0;\n  for (int i = n; i <= 2 * n; ++i) s = s + 1.0;"));
  CHECK(render_expr(start.program, *start.loops.at(0).trip) == "((2 * n) - n) + 1");

  AnalyzedProgram pragma = analyze_fixture("while_pragma.pc");
  CHECK(pragma.loops.at(0).from_pragma);
  CHECK(render_expr(pragma.program, *pragma.loops.at(0).trip) == "n");

  const std::string unanalyzable = "loop not analyzable; add #perf iterations(...)";
  auto d1 = diagnostics_of(wrap_main("  int i = 0;\n  while (i < n) i = i + 1;"));
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].message == unanalyzable);
  CHECK(d1[0].loc == SourceLoc{3, 3});
  auto d2 = diagnostics_of(wrap_main("  for (int i = 0; i < n; i = i * 2) n = n;"));
  CHECK(mentions(d2, unanalyzable));
  auto d3 = diagnostics_of(wrap_main("  for (int i = 0; i < n; ++i) i = i + 1;"));
  CHECK(mentions(d3, unanalyzable));
  auto d4 = diagnostics_of(wrap_main("  for (int i = n; i > 0; i = i - 1) n = n;"));
  CHECK(mentions(d4, unanalyzable));
  // Untracked non-canonical loops just run.
  CHECK(diagnostics_of(wrap_main("  int i = 0;\n  while (i < 5) i = i + 1;")).empty());

  auto misplaced = parse_program(wrap_main("  // #perf iterations(n)\n  int x = 0;"));
  CHECK(!misplaced.diagnostics.empty());
}

TEST_CASE("emit") {
  AnalyzedProgram program = analyze_fixture("execute.pc");
  std::string out = emit_instrumented(program.program, program.trackedness, program.loops);
  for (const char* marker : {"void execute(Num n) {ENTERFUNCTION", "DynamicMem<Double> field", "perf_malloc<Double>",
                             "LOOP(n) for (int i = 0; i < n; ++i) ITERATION", "Double localSum", "EXITFUNCTION}"})
    CHECK(out.find(marker) != std::string::npos);
  CHECK(out == read_text(golden_path("execute.emit")));

  const std::string untracked =
      "int helper(int a) {\n  int b = a * 2;\n  return b;\n}\n\nint main(int n) {\n  int x = helper(3);\n  return x;\n}\n";
  AnalyzedProgram u = analyze_source(untracked);
  std::string emitted = emit_instrumented(u.program, u.trackedness, u.loops);
  std::string stripped = emitted;
  for (std::string marker : {"ENTERFUNCTION", "EXITFUNCTION"})
    for (auto pos = stripped.find(marker); pos != std::string::npos; pos = stripped.find(marker))
      stripped.erase(pos, marker.size());
  std::string expected = untracked;
  expected.replace(expected.find("main(int n)"), 11, "main(Num n)");
  CHECK(stripped == expected);

  AnalyzedProgram nest = analyze_fixture("nest2.pc");
  std::string nested = emit_instrumented(nest.program, nest.trackedness, nest.loops);
  CHECK(nested.find("LOOP(n) for") != std::string::npos);
  CHECK(nested.find("LOOP(m) for") != std::string::npos);
}

TEST_CASE("property: emit of an untracked program re-parses to the same output") {
  const std::string src =
      "double scale(double x) {\n  return x * 2.0;\n}\n\nint main(int n) {\n  int k = 0;\n"
      "  for (int i = 0; i < 4; ++i)\n    k = k + i;\n  double y = scale(1.0);\n  return 0;\n}\n";
  AnalyzedProgram a = analyze_source(src);
  std::string once = emit_instrumented(a.program, a.trackedness, a.loops);
  // Undo the renamings so the text is PerfC again.
  std::string back = once;
  for (auto [from, to] : {std::pair<std::string, std::string>{"ENTERFUNCTION", ""}, {"EXITFUNCTION", ""},
                          {"Double", "double"}, {"Num n", "int n"}})
    for (auto pos = back.find(from); pos != std::string::npos; pos = back.find(from, pos + to.size()))
      back.replace(pos, from.size(), to);
  CHECK(back == src);
  AnalyzedProgram again = analyze_source(back);
  CHECK(emit_instrumented(again.program, again.trackedness, again.loops) == once);
}
