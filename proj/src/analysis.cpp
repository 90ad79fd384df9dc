#include "perfscope/analysis.hpp"

#include <functional>

#include "perfscope/parser.hpp"

namespace perfscope {

std::string_view to_string(Marker m) {
  switch (m) {
    case Marker::Plain: return "plain";
    case Marker::TrackedInt: return "tracked-int";
    case Marker::TrackedFloat: return "tracked-float";
    case Marker::TrackedBlock: return "tracked-block";
  }
  return "?";
}

Marker TrackednessMap::lookup(const Program& prog, std::string_view function, std::string_view name) const {
  int id = prog.find_decl(function, name);
  if (id < 0) throw std::out_of_range("no declaration '" + std::string(name) + "' in '" + std::string(function) + "'");
  return marker(id);
}

namespace {

void for_each_stmt(const Stmt& s, const std::function<void(const Stmt&)>& fn) {
  fn(s);
  for (const Stmt* child : {s.then_branch.get(), s.else_branch.get(), s.for_init.get(), s.for_step.get(), s.body.get()})
    if (child) for_each_stmt(*child, fn);
  for (const auto& inner : s.stmts) for_each_stmt(*inner, fn);
}

void for_each_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& op : e.operands) for_each_expr(*op, fn);
}

// Every expression directly owned by a statement (not its sub-statements).
void stmt_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn) {
  for (const Expr* e : {s.init.get(), s.target.get(), s.value.get(), s.cond.get()})
    if (e) for_each_expr(*e, fn);
  if (s.pragma) for_each_expr(*s.pragma->count, fn);
}

class Propagation {
 public:
  Propagation(const Program& prog, TrackednessMap& map) : prog_(prog), map_(map) {}

  void run() {
    bool changed = true;
    while (changed) {
      changed_ = false;
      ++map_.passes;
      for (std::size_t f = 0; f < prog_.functions.size(); ++f) {
        fn_index_ = f;
        for_each_stmt(*prog_.functions[f].body, [this](const Stmt& s) { visit(s); });
      }
      changed = changed_;
    }
  }

 private:
  void mark(int decl, Marker m) {
    if (decl < 0) return;
    auto& slot = map_.decls[static_cast<std::size_t>(decl)];
    if (slot == Marker::Plain && m != Marker::Plain) {
      slot = m;
      changed_ = true;
    }
  }

  void visit(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Decl:
        if (s.type.kind == TypeKind::Int && s.init && is_tracked(prog_, map_, *s.init)) mark(s.decl, Marker::TrackedInt);
        break;
      case StmtKind::Assign:
        if (s.target->kind == ExprKind::Ident && s.target->type == TypeKind::Int && is_tracked(prog_, map_, *s.value))
          mark(s.target->decl, Marker::TrackedInt);
        break;
      case StmtKind::Return:
        if (s.value && prog_.functions[fn_index_].return_type.kind == TypeKind::Int &&
            is_tracked(prog_, map_, *s.value) && !map_.tracked_returns[fn_index_]) {
          map_.tracked_returns[fn_index_] = true;
          changed_ = true;
        }
        break;
      default: break;
    }
    stmt_exprs(s, [this](const Expr& e) {
      if (e.kind != ExprKind::Call || e.callee < 0) return;
      const Function& callee = prog_.functions[static_cast<std::size_t>(e.callee)];
      for (std::size_t i = 0; i < callee.params.size() && i < e.operands.size(); ++i)
        if (callee.params[i].type.kind == TypeKind::Int && is_tracked(prog_, map_, *e.operands[i]))
          mark(callee.params[i].decl, Marker::TrackedInt);
    });
  }

  const Program& prog_;
  TrackednessMap& map_;
  std::size_t fn_index_ = 0;
  bool changed_ = false;
};

}  // namespace

bool is_tracked(const Program& prog, const TrackednessMap& map, const Expr& e) {
  if (e.type != TypeKind::Int) return false;
  switch (e.kind) {
    case ExprKind::Ident: return e.decl >= 0 && map.marker(e.decl) == Marker::TrackedInt;
    case ExprKind::Call:
      if (e.callee >= 0 && map.tracked_returns[static_cast<std::size_t>(e.callee)]) return true;
      return false;
    case ExprKind::Binary:
    case ExprKind::Unary:
      for (const auto& op : e.operands)
        if (is_tracked(prog, map, *op)) return true;
      // A comparison of tracked doubles is not a tracked int.
      return false;
    default: return false;
  }
}

TrackednessMap analyze_trackedness(const Program& prog) {
  TrackednessMap seed;
  seed.decls.assign(prog.decls.size(), Marker::Plain);
  seed.tracked_returns.assign(prog.functions.size(), false);
  return analyze_trackedness(prog, seed);
}

TrackednessMap analyze_trackedness(const Program& prog, const TrackednessMap& seed) {
  TrackednessMap map;
  map.decls = seed.decls;
  map.decls.resize(prog.decls.size(), Marker::Plain);
  map.tracked_returns = seed.tracked_returns;
  map.tracked_returns.resize(prog.functions.size(), false);

  for (std::size_t i = 0; i < prog.decls.size(); ++i) {
    const DeclInfo& d = prog.decls[i];
    if (d.type == TypeKind::Double) map.decls[i] = Marker::TrackedFloat;
    if (is_pointer(d.type)) map.decls[i] = Marker::TrackedBlock;
  }
  if (prog.main_index >= 0)
    for (const Param& p : prog.main().params) map.decls[static_cast<std::size_t>(p.decl)] = Marker::TrackedInt;

  Propagation(prog, map).run();
  return map;
}

// ---------------------------------------------------------------------------
// Loop annotation

namespace {

ExprPtr synth_int(std::int64_t v, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::IntLit;
  e->int_value = v;
  e->name = std::to_string(v);
  e->loc = loc;
  e->synthetic = true;
  return e;
}

ExprPtr synth_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = ExprKind::Binary;
  e->binary_op = op;
  e->loc = loc;
  e->synthetic = true;
  e->operands.push_back(std::move(lhs));
  e->operands.push_back(std::move(rhs));
  return e;
}

bool mentions(const Expr& e, int decl) {
  bool found = false;
  for_each_expr(e, [&](const Expr& x) { found = found || (x.kind == ExprKind::Ident && x.decl == decl); });
  return found;
}

bool assigns(const Stmt& body, int decl) {
  bool found = false;
  for_each_stmt(body, [&](const Stmt& s) {
    if (s.kind == StmtKind::Assign && s.target->kind == ExprKind::Ident && s.target->decl == decl) found = true;
  });
  return found;
}

struct CanonicalFor {
  int var = -1;
  const Expr* start = nullptr;
  const Expr* bound = nullptr;
  bool inclusive = false;
  std::int64_t step = 1;
};

// for (v = c0; v < bound; v += s) with a positive literal step and a body that
// leaves v alone.
std::optional<CanonicalFor> match_canonical(const Stmt& loop) {
  CanonicalFor c;
  const Stmt& init = *loop.for_init;
  if (init.kind == StmtKind::Decl && init.type.kind == TypeKind::Int && init.init) {
    c.var = init.decl;
    c.start = init.init.get();
  } else if (init.kind == StmtKind::Assign && init.assign_op == AssignOp::Set && init.target->kind == ExprKind::Ident &&
             init.target->type == TypeKind::Int) {
    c.var = init.target->decl;
    c.start = init.value.get();
  } else {
    return std::nullopt;
  }

  const Expr& cond = *loop.cond;
  if (cond.kind != ExprKind::Binary || (cond.binary_op != BinaryOp::Lt && cond.binary_op != BinaryOp::Le))
    return std::nullopt;
  const Expr& lhs = *cond.operands[0];
  if (lhs.kind != ExprKind::Ident || lhs.decl != c.var) return std::nullopt;
  c.bound = cond.operands[1].get();
  c.inclusive = cond.binary_op == BinaryOp::Le;
  if (mentions(*c.bound, c.var) || mentions(*c.start, c.var)) return std::nullopt;

  const Stmt& step = *loop.for_step;
  if (step.kind != StmtKind::Assign || step.target->kind != ExprKind::Ident || step.target->decl != c.var)
    return std::nullopt;
  if (step.assign_op == AssignOp::Add && step.value->kind == ExprKind::IntLit) {
    c.step = step.value->int_value;
  } else if (step.assign_op == AssignOp::Set && step.value->kind == ExprKind::Binary &&
             step.value->binary_op == BinaryOp::Add) {
    const Expr& a = *step.value->operands[0];
    const Expr& b = *step.value->operands[1];
    if (a.kind == ExprKind::Ident && a.decl == c.var && b.kind == ExprKind::IntLit)
      c.step = b.int_value;
    else if (b.kind == ExprKind::Ident && b.decl == c.var && a.kind == ExprKind::IntLit)
      c.step = a.int_value;
    else
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (c.step <= 0) return std::nullopt;
  if (assigns(*loop.body, c.var)) return std::nullopt;
  return c;
}

// ceil((bound - start [+1 if inclusive]) / step), folded for literal starts.
ExprPtr trip_expression(const CanonicalFor& c, SourceLoc loc) {
  ExprPtr base;
  if (c.start->kind == ExprKind::IntLit) {
    std::int64_t offset = c.start->int_value - (c.inclusive ? 1 : 0);
    if (offset == 0)
      base = c.bound->clone();
    else if (offset > 0)
      base = synth_binary(BinaryOp::Sub, c.bound->clone(), synth_int(offset, loc), loc);
    else
      base = synth_binary(BinaryOp::Add, c.bound->clone(), synth_int(-offset, loc), loc);
  } else {
    base = synth_binary(BinaryOp::Sub, c.bound->clone(), c.start->clone(), loc);
    if (c.inclusive) base = synth_binary(BinaryOp::Add, std::move(base), synth_int(1, loc), loc);
  }
  if (c.step == 1) return base;
  ExprPtr rounded = synth_binary(BinaryOp::Add, std::move(base), synth_int(c.step - 1, loc), loc);
  return synth_binary(BinaryOp::Div, std::move(rounded), synth_int(c.step, loc), loc);
}

}  // namespace

LoopAnalysis annotate_loops(const Program& prog, const TrackednessMap& map) {
  LoopAnalysis out;
  out.loops.resize(static_cast<std::size_t>(prog.loop_count));
  auto unanalyzable = [&](const Stmt& s) {
    out.diagnostics.push_back({s.loc, Severity::Error, "loop not analyzable; add #perf iterations(...)"});
  };

  for (const auto& fn : prog.functions) {
    for_each_stmt(*fn.body, [&](const Stmt& s) {
      if (s.kind != StmtKind::For && s.kind != StmtKind::While) return;
      LoopAnnotation& a = out.loops[static_cast<std::size_t>(s.loop_id)];
      a.loop_id = s.loop_id;
      a.loc = s.loc;
      if (s.pragma) {
        a.mode = LoopMode::Trip;
        a.trip = s.pragma->count->clone();
        a.from_pragma = true;
        return;
      }
      if (s.kind == StmtKind::For) {
        if (auto c = match_canonical(s)) {
          if (is_tracked(prog, map, *c->bound) || is_tracked(prog, map, *c->start)) {
            a.mode = LoopMode::Trip;
            a.trip = trip_expression(*c, s.loc);
          }
          return;
        }
      }
      // Non-canonical or while loop: fine to run exactly unless its condition
      // depends on the input size.
      if (is_tracked(prog, map, *s.cond)) unanalyzable(s);
    });
  }
  return out;
}

std::string render_expr(const Program& prog, const Expr& e) {
  if (!e.synthetic) return prog.source.substr(e.begin, e.end - e.begin);
  switch (e.kind) {
    case ExprKind::IntLit: return std::to_string(e.int_value);
    case ExprKind::Binary: {
      auto side = [&](const Expr& x) {
        std::string text = render_expr(prog, x);
        if (x.kind == ExprKind::Binary && !x.parenthesized) return "(" + text + ")";
        return text;
      };
      return side(*e.operands[0]) + " " + std::string(to_string(e.binary_op)) + " " + side(*e.operands[1]);
    }
    default: return e.name;
  }
}

AnalyzedProgram analyze_source(std::string source) {
  AnalyzedProgram out{parse(std::move(source)), {}, {}};
  out.trackedness = analyze_trackedness(out.program);
  out.loops = annotate_loops(out.program, out.trackedness);
  if (!out.loops.ok()) throw DiagnosticError(out.loops.diagnostics);
  return out;
}

}  // namespace perfscope
