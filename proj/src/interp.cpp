#include "perfscope/interp.hpp"

#include <pthread.h>

#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <unordered_map>

namespace perfscope {

namespace {

constexpr std::int64_t kMaxBlockElements = std::int64_t{1} << 27;
constexpr std::size_t kInterpreterStack = std::size_t{1} << 30;

struct BlockData {
  TypeKind element = TypeKind::Double;
  std::vector<double> doubles;
  std::vector<std::int64_t> ints;
  std::int64_t length = 0;
};

struct Frame {
  std::unordered_map<int, Value> slots;
  std::optional<Value> returned;
};

enum class Flow { Normal, Return };

// Outcome of a condition under both configurations.
struct Truth {
  bool small = false;
  bool large = false;
};

class Interpreter {
 public:
  Interpreter(const Program& prog, const TrackednessMap& map, const LoopAnalysis& loops, const RunOptions& options)
      : prog_(prog), map_(map), loops_(loops), opt_(options), ctx_(context_inputs(options), options.max_iterations) {}

  ProfileResult run() {
    const Function& main = prog_.main();
    for (const auto& in : opt_.inputs) {
      bool found = false;
      for (const Param& p : main.params) found = found || p.name == in.name;
      if (!found) throw Error(ErrorKind::Configuration, "input '" + in.name + "' is not a parameter of main");
    }
    std::vector<Value> args;
    for (const Param& p : main.params) {
      auto it = std::find_if(opt_.inputs.begin(), opt_.inputs.end(), [&](const auto& in) { return in.name == p.name; });
      if (it == opt_.inputs.end())
        throw Error(ErrorKind::Configuration, "unbound main parameter '" + p.name + "'", p.loc);
      args.emplace_back(profile() ? ctx_.input(p.name) : Num{it->small, term_const(it->small), it->small, true});
    }
    Value result = invoke(static_cast<std::size_t>(prog_.main_index), std::move(args), main.loc);

    ProfileResult r = ctx_.finalize();
    r.mode = profile() ? "profile" : "exact";
    if (const auto* n = std::get_if<Num>(&result)) r.main_result = *n;
    if (const auto* i = std::get_if<std::int64_t>(&result)) r.main_result = num_from_literal(*i);
    return r;
  }

 private:
  static std::vector<InputSpec> context_inputs(const RunOptions& options) {
    if (options.mode == RunMode::Profile) return options.inputs;
    std::vector<InputSpec> exact = options.inputs;
    for (auto& in : exact) in.large = in.small;
    return exact;
  }

  bool profile() const { return opt_.mode == RunMode::Profile; }
  Frame& frame() { return frames_.back(); }
  WarningSink sink() { return ctx_.warning_sink(); }

  // -- value conversions ------------------------------------------------------

  [[noreturn]] static void type_error(SourceLoc loc, const std::string& what) {
    throw Error(ErrorKind::InternalInvariant, "type error at runtime: " + what, loc);
  }

  static double to_double(const Value& v, SourceLoc loc) {
    if (const auto* f = std::get_if<TrackedFloat>(&v)) return f->value;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* n = std::get_if<Num>(&v)) return static_cast<double>(n->small);
    type_error(loc, "expected a number");
  }

  static std::int64_t double_to_int(double d, SourceLoc loc) {
    if (!std::isfinite(d) || d >= 9.2233720368547758e18 || d < -9.2233720368547758e18)
      throw Error(ErrorKind::Overflow, "floating-point value does not fit in an int", loc);
    return static_cast<std::int64_t>(d);
  }

  static Num to_num(const Value& v, SourceLoc loc) {
    if (const auto* n = std::get_if<Num>(&v)) return *n;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return num_from_literal(*i);
    if (const auto* f = std::get_if<TrackedFloat>(&v)) return num_from_literal(double_to_int(f->value, loc));
    type_error(loc, "expected an integer");
  }

  static std::int64_t to_small(const Value& v, SourceLoc loc) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* n = std::get_if<Num>(&v)) return n->small;
    if (const auto* f = std::get_if<TrackedFloat>(&v)) return double_to_int(f->value, loc);
    type_error(loc, "expected an integer");
  }

  Value coerce(TypeKind type, Marker marker, const Value& v, SourceLoc loc) const {
    switch (type) {
      case TypeKind::Int:
        if (marker == Marker::TrackedInt) return to_num(v, loc);
        return to_small(v, loc);
      case TypeKind::Double: return TrackedFloat{to_double(v, loc)};
      case TypeKind::IntPtr:
      case TypeKind::DoublePtr:
        if (!std::holds_alternative<BlockRef>(v)) type_error(loc, "expected a pointer");
        return v;
      case TypeKind::Void: return std::monostate{};
    }
    return v;
  }

  Value coerce_to_decl(int decl, const Value& v, SourceLoc loc) const {
    return coerce(prog_.decls[static_cast<std::size_t>(decl)].type, map_.marker(decl), v, loc);
  }

  Truth truth(const Value& v, SourceLoc loc) const {
    if (const auto* n = std::get_if<Num>(&v)) return {n->small != 0, n->large != 0};
    if (const auto* i = std::get_if<std::int64_t>(&v)) return {*i != 0, *i != 0};
    if (const auto* f = std::get_if<TrackedFloat>(&v)) return {f->value != 0.0, f->value != 0.0};
    type_error(loc, "condition is not a number");
  }

  bool decide(const Truth& t) const { return profile() ? t.large : t.small; }

  bool condition(const Expr& e) {
    Truth t = truth(eval(e), e.loc);
    if (profile() && t.small != t.large)
      ctx_.warn({WarningKind::BranchDivergence, e.loc,
                 std::string("condition follows the large configuration (") + (t.large ? "true" : "false") +
                     ") while the small configuration gives " + (t.small ? "true" : "false")});
    return decide(t);
  }

  // -- expressions ------------------------------------------------------------

  Value eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return e.int_value;
      case ExprKind::FloatLit: return TrackedFloat{e.float_value};
      case ExprKind::Sizeof: return size_of(*e.sizeof_type);
      case ExprKind::Ident: return read_var(e.decl, e.loc);
      case ExprKind::Index: return read_element(e);
      case ExprKind::Binary: return binary(e);
      case ExprKind::Unary: return unary(e);
      case ExprKind::Call: return call(e);
      case ExprKind::MpiConstant:
      case ExprKind::AddressOf: type_error(e.loc, "'" + render_expr(prog_, e) + "' is only valid as an MPI argument");
    }
    return std::monostate{};
  }

  Value read_var(int decl, SourceLoc loc) {
    auto it = frame().slots.find(decl);
    if (it == frame().slots.end())
      throw Error(ErrorKind::Uninitialized,
                  "read of uninitialized variable '" + prog_.decls[static_cast<std::size_t>(decl)].name + "'", loc);
    return it->second;
  }

  BlockData& block_for(const Value& v, SourceLoc loc) {
    const auto* ref = std::get_if<BlockRef>(&v);
    if (!ref) type_error(loc, "expected a pointer");
    if (!ctx_.block_live(ref->id)) throw Error(ErrorKind::UseAfterFree, "access to a freed block", loc);
    return blocks_.at(ref->id);
  }

  // Index into block storage; nullopt when a profile-mode access hits an empty block.
  std::optional<std::size_t> slot_index(const BlockData& b, const Value& index, SourceLoc loc) const {
    std::int64_t i = to_small(index, loc);
    if (profile()) {
      if (b.length == 0) return std::nullopt;
      i %= b.length;
      if (i < 0) i += b.length;
      return static_cast<std::size_t>(i);
    }
    if (i < 0 || i >= b.length)
      throw Error(ErrorKind::OutOfBounds,
                  "index " + std::to_string(i) + " out of bounds for a block of " + std::to_string(b.length) +
                      " elements",
                  loc);
    return static_cast<std::size_t>(i);
  }

  Value read_element(const Expr& e) {
    Value base = eval(*e.operands[0]);
    Value index = eval(*e.operands[1]);
    BlockData& b = block_for(base, e.loc);
    auto i = slot_index(b, index, e.loc);
    if (b.element == TypeKind::Double) return TrackedFloat{i ? b.doubles[*i] : 0.0};
    return i ? b.ints[*i] : std::int64_t{0};
  }

  void write_element(const Value& base, const Value& index, const Value& v, SourceLoc loc) {
    BlockData& b = block_for(base, loc);
    auto i = slot_index(b, index, loc);
    if (!i) return;
    if (b.element == TypeKind::Double)
      b.doubles[*i] = to_double(v, loc);
    else
      b.ints[*i] = to_small(v, loc);
  }

  static IntOp int_op(BinaryOp op) {
    switch (op) {
      case BinaryOp::Sub: return IntOp::Sub;
      case BinaryOp::Mul: return IntOp::Mul;
      case BinaryOp::Div: return IntOp::Div;
      case BinaryOp::Mod: return IntOp::Mod;
      default: return IntOp::Add;
    }
  }

  static CmpOp cmp_op(BinaryOp op) {
    switch (op) {
      case BinaryOp::Lt: return CmpOp::Lt;
      case BinaryOp::Le: return CmpOp::Le;
      case BinaryOp::Gt: return CmpOp::Gt;
      case BinaryOp::Ge: return CmpOp::Ge;
      case BinaryOp::Eq: return CmpOp::Eq;
      default: return CmpOp::Ne;
    }
  }

  static FloatOp float_op(BinaryOp op) {
    switch (op) {
      case BinaryOp::Sub: return FloatOp::Sub;
      case BinaryOp::Mul: return FloatOp::Mul;
      case BinaryOp::Div: return FloatOp::Div;
      default: return FloatOp::Add;
    }
  }

  Value arith(BinaryOp op, const Value& a, const Value& b, SourceLoc loc) {
    if (std::holds_alternative<TrackedFloat>(a) || std::holds_alternative<TrackedFloat>(b))
      return float_binop(float_op(op), TrackedFloat{to_double(a, loc)}, TrackedFloat{to_double(b, loc)}, ctx_);
    if (std::holds_alternative<Num>(a) || std::holds_alternative<Num>(b))
      return num_binop(int_op(op), to_num(a, loc), to_num(b, loc), sink(), loc);
    return checked_int_op(int_op(op), to_small(a, loc), to_small(b, loc), loc);
  }

  static Num truth_num(Truth t) {
    Num n;
    n.small = t.small;
    n.large = t.large;
    n.term = term_const(t.large ? 1 : 0);
    n.exact = t.small == t.large;
    return n;
  }

  Value compare(BinaryOp op, const Value& a, const Value& b, SourceLoc loc) {
    CmpOp c = cmp_op(op);
    if (std::holds_alternative<TrackedFloat>(a) || std::holds_alternative<TrackedFloat>(b))
      return std::int64_t{float_compare(c, TrackedFloat{to_double(a, loc)}, TrackedFloat{to_double(b, loc)})};
    if (std::holds_alternative<Num>(a) || std::holds_alternative<Num>(b)) {
      Num x = to_num(a, loc), y = to_num(b, loc);
      Truth t;
      t.small = compare_ints(c, x.small, y.small);
      t.large = profile() ? num_compare(c, x, y, sink(), loc) : t.small;
      return truth_num(t);
    }
    return std::int64_t{compare_ints(c, to_small(a, loc), to_small(b, loc))};
  }

  Value binary(const Expr& e) {
    const BinaryOp op = e.binary_op;
    if (op == BinaryOp::And || op == BinaryOp::Or) {
      Value lhs = eval(*e.operands[0]);
      Truth l = truth(lhs, e.loc);
      bool tracked = std::holds_alternative<Num>(lhs);
      bool short_circuit = op == BinaryOp::And ? !decide(l) : decide(l);
      Truth out = l;
      if (!short_circuit) {
        Value rhs = eval(*e.operands[1]);
        Truth r = truth(rhs, e.loc);
        tracked = tracked || std::holds_alternative<Num>(rhs);
        if (op == BinaryOp::And)
          out = {l.small && r.small, l.large && r.large};
        else
          out = {l.small || r.small, l.large || r.large};
      }
      if (tracked) return truth_num(out);
      return std::int64_t{decide(out)};
    }
    Value a = eval(*e.operands[0]);
    Value b = eval(*e.operands[1]);
    switch (op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod: return arith(op, a, b, e.loc);
      default: return compare(op, a, b, e.loc);
    }
  }

  Value unary(const Expr& e) {
    Value v = eval(*e.operands[0]);
    if (e.unary_op == UnaryOp::Not) {
      Truth t = truth(v, e.loc);
      Truth out{!t.small, !t.large};
      if (std::holds_alternative<Num>(v)) return truth_num(out);
      return std::int64_t{decide(out)};
    }
    // Negation is not a FLOP.
    if (const auto* f = std::get_if<TrackedFloat>(&v)) return TrackedFloat{-f->value};
    if (const auto* n = std::get_if<Num>(&v)) return num_binop(IntOp::Sub, num_from_literal(0), *n, sink(), e.loc);
    return checked_int_op(IntOp::Sub, 0, to_small(v, e.loc), e.loc);
  }

  // -- calls ------------------------------------------------------------------

  Value call(const Expr& e) {
    if (e.builtin != Builtin::None) return builtin(e);
    std::vector<Value> args;
    args.reserve(e.operands.size());
    for (const auto& a : e.operands) args.push_back(eval(*a));
    return invoke(static_cast<std::size_t>(e.callee), std::move(args), e.loc);
  }

  Value invoke(std::size_t index, std::vector<Value> args, SourceLoc loc) {
    const Function& fn = prog_.functions[index];
    if (depth_ >= opt_.recursion_limit)
      throw Error(ErrorKind::RecursionLimit,
                  "call depth exceeds the limit of " + std::to_string(opt_.recursion_limit) + " in '" + fn.name + "'",
                  loc);
    Frame f;
    for (std::size_t i = 0; i < fn.params.size(); ++i)
      f.slots.emplace(fn.params[i].decl, coerce_to_decl(fn.params[i].decl, args[i], loc));

    ++depth_;
    ctx_.enter_function(fn.name);
    frames_.push_back(std::move(f));
    exec(*fn.body);
    std::optional<Value> returned = std::move(frame().returned);
    frames_.pop_back();
    ctx_.exit_function();
    --depth_;

    TypeKind rt = fn.return_type.kind;
    if (rt == TypeKind::Void) return std::monostate{};
    if (!returned) throw Error(ErrorKind::Uninitialized, "'" + fn.name + "' finished without returning a value", fn.loc);
    Marker m = Marker::Plain;
    if (rt == TypeKind::Int && map_.tracked_returns[index]) m = Marker::TrackedInt;
    return coerce(rt, m, *returned, loc);
  }

  static std::int64_t mpi_type_size(const Expr& datatype) { return datatype.name == "MPI_INT" ? 4 : 8; }

  Value builtin(const Expr& e) {
    switch (e.builtin) {
      case Builtin::Malloc: {
        Num size = to_num(eval(*e.operands[0]), e.loc);
        std::int64_t elem = size_of(e.malloc_element);
        if (size.small >= 0 && size.small / elem > kMaxBlockElements)
          throw Error(ErrorKind::Allocation, "block of " + std::to_string(size.small) + " bytes is too large to run",
                      e.loc);
        int id = ctx_.mem_alloc(size, e.loc);
        BlockData b;
        b.element = e.malloc_element;
        b.length = size.small / elem;
        if (b.element == TypeKind::Double)
          b.doubles.assign(static_cast<std::size_t>(b.length), 0.0);
        else
          b.ints.assign(static_cast<std::size_t>(b.length), 0);
        blocks_.emplace(id, std::move(b));
        return BlockRef{id, e.malloc_element};
      }
      case Builtin::Free: {
        Value p = eval(*e.operands[0]);
        const auto* ref = std::get_if<BlockRef>(&p);
        if (!ref) type_error(e.loc, "free of a non-pointer");
        ctx_.mem_free(ref->id, e.loc);
        return std::monostate{};
      }
      case Builtin::MpiAllreduce:
      case Builtin::MpiSend:
      case Builtin::MpiRecv: return mpi(e);
      case Builtin::None: break;
    }
    return std::monostate{};
  }

  Value mpi(const Expr& e) {
    const bool allreduce = e.builtin == Builtin::MpiAllreduce;
    const std::size_t count_arg = allreduce ? 2 : 1;
    Num count = to_num(eval(*e.operands[count_arg]), e.loc);
    Num bytes = num_binop(IntOp::Mul, count, num_from_literal(mpi_type_size(*e.operands[count_arg + 1])), sink(), e.loc);
    for (std::size_t i = count_arg + 2; i < e.operands.size(); ++i)
      if (e.operands[i]->kind != ExprKind::MpiConstant) eval(*e.operands[i]);

    CommKind kind = allreduce ? CommKind::Allreduce : e.builtin == Builtin::MpiSend ? CommKind::Send : CommKind::Recv;
    ctx_.comm_event(kind, bytes, e.loc);

    // A single rank: allreduce copies send to receive, recv zero-fills an
    // uninitialized scalar.
    if (allreduce) {
      const Expr& src = *e.operands[0];
      const Expr& dst = *e.operands[1];
      if (src.kind == ExprKind::AddressOf && dst.kind == ExprKind::AddressOf) {
        int to = dst.operands[0]->decl;
        frame().slots[to] = coerce_to_decl(to, read_var(src.operands[0]->decl, src.loc), e.loc);
      } else if (src.kind == ExprKind::Ident && dst.kind == ExprKind::Ident) {
        BlockData& from = block_for(eval(src), src.loc);
        BlockData& to = block_for(eval(dst), dst.loc);
        std::int64_t n = std::min({std::max<std::int64_t>(count.small, 0), from.length, to.length});
        for (std::int64_t i = 0; i < n; ++i) {
          auto k = static_cast<std::size_t>(i);
          if (to.element == TypeKind::Double)
            to.doubles[k] = from.element == TypeKind::Double ? from.doubles[k] : static_cast<double>(from.ints[k]);
          else
            to.ints[k] = from.element == TypeKind::Int ? from.ints[k] : static_cast<std::int64_t>(from.doubles[k]);
        }
      }
    } else if (e.builtin == Builtin::MpiRecv && e.operands[0]->kind == ExprKind::AddressOf) {
      int to = e.operands[0]->operands[0]->decl;
      if (!frame().slots.count(to)) frame().slots[to] = coerce_to_decl(to, std::int64_t{0}, e.loc);
    }
    return std::int64_t{0};
  }

  // -- statements -------------------------------------------------------------

  void assign(const Stmt& s) {
    const Expr& target = *s.target;
    if (target.kind == ExprKind::Ident) {
      Value v = eval(*s.value);
      if (s.assign_op != AssignOp::Set) v = arith(compound_op(s.assign_op), read_var(target.decl, target.loc), v, s.loc);
      frame().slots[target.decl] = coerce_to_decl(target.decl, v, s.loc);
      return;
    }
    Value base = eval(*target.operands[0]);
    Value index = eval(*target.operands[1]);
    Value v = eval(*s.value);
    if (s.assign_op != AssignOp::Set) {
      BlockData& b = block_for(base, target.loc);
      auto i = slot_index(b, index, target.loc);
      Value cur;
      if (b.element == TypeKind::Double)
        cur = TrackedFloat{i ? b.doubles[*i] : 0.0};
      else
        cur = i ? b.ints[*i] : std::int64_t{0};
      v = arith(compound_op(s.assign_op), cur, v, s.loc);
    }
    write_element(base, index, v, s.loc);
  }

  static BinaryOp compound_op(AssignOp op) {
    switch (op) {
      case AssignOp::Sub: return BinaryOp::Sub;
      case AssignOp::Mul: return BinaryOp::Mul;
      case AssignOp::Div: return BinaryOp::Div;
      case AssignOp::Mod: return BinaryOp::Mod;
      default: return BinaryOp::Add;
    }
  }

  Flow exec(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Decl:
        if (s.init)
          frame().slots[s.decl] = coerce_to_decl(s.decl, eval(*s.init), s.loc);
        else
          frame().slots.erase(s.decl);
        return Flow::Normal;
      case StmtKind::Assign: assign(s); return Flow::Normal;
      case StmtKind::ExprStmt: eval(*s.value); return Flow::Normal;
      case StmtKind::Return:
        frame().returned = s.value ? eval(*s.value) : Value{std::monostate{}};
        return Flow::Return;
      case StmtKind::Block:
        for (const auto& inner : s.stmts)
          if (exec(*inner) == Flow::Return) return Flow::Return;
        return Flow::Normal;
      case StmtKind::If:
        if (condition(*s.cond)) return exec(*s.then_branch);
        if (s.else_branch) return exec(*s.else_branch);
        return Flow::Normal;
      case StmtKind::For:
      case StmtKind::While: return loop(s);
    }
    return Flow::Normal;
  }

  Flow loop(const Stmt& s) {
    const bool is_for = s.kind == StmtKind::For;
    if (is_for) exec(*s.for_init);
    const LoopAnnotation& a = loops_.at(s.loop_id);

    if (profile() && a.mode == LoopMode::Trip) {
      Num trip = to_num(eval(*a.trip), s.loc);
      std::size_t scope = ctx_.loop_enter(trip, s.loc);
      while (ctx_.loop_iteration(scope)) {
        if (exec(*s.body) == Flow::Return) {
          ctx_.loop_exit(scope);
          return Flow::Return;
        }
        if (is_for) exec(*s.for_step);
      }
      ctx_.loop_exit(scope);
      return Flow::Normal;
    }

    while (condition(*s.cond)) {
      if (exec(*s.body) == Flow::Return) return Flow::Return;
      if (is_for) exec(*s.for_step);
    }
    return Flow::Normal;
  }

  const Program& prog_;
  const TrackednessMap& map_;
  const LoopAnalysis& loops_;
  RunOptions opt_;
  Context ctx_;
  std::map<int, BlockData> blocks_;
  std::vector<Frame> frames_;
  int depth_ = 0;
};

// Runs `job` on a thread with a large stack so deep PerfC recursion does not
// exhaust the native stack before the recursion limit triggers.
template <class Job>
void run_with_large_stack(Job& job) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kInterpreterStack);
  pthread_t thread;
  auto trampoline = [](void* arg) -> void* {
    (*static_cast<Job*>(arg))();
    return nullptr;
  };
  int rc = pthread_create(&thread, &attr, trampoline, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    job();  // fall back to the calling thread
    return;
  }
  pthread_join(thread, nullptr);
}

}  // namespace

ProfileResult run(const Program& prog, const TrackednessMap& map, const LoopAnalysis& loops, const RunOptions& options) {
  if (!loops.ok()) throw DiagnosticError(loops.diagnostics);
  std::optional<ProfileResult> result;
  std::exception_ptr failure;
  auto job = [&] {
    try {
      result = Interpreter(prog, map, loops, options).run();
    } catch (...) {
      failure = std::current_exception();
    }
  };
  run_with_large_stack(job);
  if (failure) std::rethrow_exception(failure);
  return std::move(*result);
}

ProfileResult run(const AnalyzedProgram& analyzed, const RunOptions& options) {
  return run(analyzed.program, analyzed.trackedness, analyzed.loops, options);
}

Rational constant_count(const Term& t) {
  if (!t.is_constant()) throw Error(ErrorKind::InternalInvariant, "expected a constant counter, got " + format(t));
  return t.constant_value();
}

std::vector<ExactMeasurement> run_exact_series(const AnalyzedProgram& analyzed, std::string_view input,
                                               const std::vector<std::int64_t>& sizes,
                                               const std::vector<InputSpec>& fixed) {
  std::vector<ExactMeasurement> out;
  for (std::int64_t size : sizes) {
    RunOptions opt;
    opt.mode = RunMode::Exact;
    opt.inputs = fixed;
    opt.inputs.push_back(InputSpec{std::string(input), size, size});
    ProfileResult r = run(analyzed, opt);
    out.push_back(ExactMeasurement{size, constant_count(r.flops), Rational(r.peak_large),
                                   constant_count(r.total_comm_calls()), constant_count(r.total_comm_bytes()),
                                   constant_count(r.alloc_bytes_total)});
  }
  return out;
}

}  // namespace perfscope
