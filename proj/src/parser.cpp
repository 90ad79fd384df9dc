#include "perfscope/parser.hpp"

#include <map>
#include <set>

#include "perfscope/lexer.hpp"

namespace perfscope {

namespace {

struct ParseFailure {};

constexpr std::size_t kMaxDiagnostics = 25;

class Parser {
 public:
  Parser(const std::string& source, std::vector<Diagnostic>& diags)
      : src_(source), diags_(diags), toks_(lex(source, diags)) {}

  Program run() {
    Program prog;
    while (!at(Tok::Eof) && diags_.size() < kMaxDiagnostics) {
      try {
        prog.functions.push_back(function());
      } catch (const ParseFailure&) {
        skip_to_top_level();
      }
    }
    prog.loop_count = loop_count_;
    return prog;
  }

 private:
  // -- token plumbing -------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
  bool at(Tok k) const { return cur().kind == k; }
  const Token& prev() const { return toks_[pos_ - 1]; }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::Eof) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  const Token& expect(Tok k, std::string_view what = {}) {
    if (!at(k)) {
      std::string msg = "expected " + std::string(to_string(k));
      if (!what.empty()) msg += " " + std::string(what);
      fail(cur().loc, msg + ", found " + describe(cur()));
    }
    return take();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Eof) return "end of file";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(SourceLoc loc, std::string msg) {
    diags_.push_back({loc, Severity::Error, std::move(msg)});
    throw ParseFailure{};
  }

  void skip_to_top_level() {
    int depth = 0;
    while (!at(Tok::Eof)) {
      if (at(Tok::LBrace)) ++depth;
      if (at(Tok::RBrace)) {
        take();
        if (--depth <= 0) return;
        continue;
      }
      take();
    }
  }

  void sync_statement() {
    int depth = 0;
    while (!at(Tok::Eof)) {
      if (at(Tok::LBrace)) ++depth;
      if (at(Tok::RBrace)) {
        if (depth == 0) return;
        --depth;
      }
      if (at(Tok::Semi) && depth == 0) {
        take();
        return;
      }
      take();
    }
  }

  // -- declarations -----------------------------------------------------------

  bool at_type() const { return at(Tok::KwInt) || at(Tok::KwDouble) || at(Tok::KwVoid); }

  TypeSpec type_spec() {
    TypeSpec t;
    const Token& kw = take();
    t.loc = kw.loc;
    t.begin = kw.begin;
    t.end = kw.end;
    t.kind = kw.kind == Tok::KwInt ? TypeKind::Int : kw.kind == Tok::KwDouble ? TypeKind::Double : TypeKind::Void;
    if (at(Tok::Star)) {
      if (t.kind == TypeKind::Void) fail(cur().loc, "unsupported construct: void pointer");
      t.end = take().end;
      t.kind = t.kind == TypeKind::Int ? TypeKind::IntPtr : TypeKind::DoublePtr;
      if (at(Tok::Star)) fail(cur().loc, "unsupported construct: pointer to pointer");
    }
    return t;
  }

  Function function() {
    Function fn;
    if (!at_type()) fail(cur().loc, "expected a function definition, found " + describe(cur()));
    fn.return_type = type_spec();
    const Token& name = expect(Tok::Ident, "for the function name");
    fn.name = name.text;
    fn.name_begin = name.begin;
    fn.loc = name.loc;
    expect(Tok::LParen);
    if (at(Tok::KwVoid) && ahead(1).kind == Tok::RParen) {
      take();
    } else if (!at(Tok::RParen)) {
      do {
        Param p;
        if (!at(Tok::KwInt) && !at(Tok::KwDouble))
          fail(cur().loc, "expected a parameter type, found " + describe(cur()));
        p.type = type_spec();
        const Token& pn = expect(Tok::Ident, "for the parameter name");
        p.name = pn.text;
        p.name_begin = pn.begin;
        p.loc = pn.loc;
        fn.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    if (!at(Tok::LBrace)) fail(cur().loc, "expected '{' to open the body of '" + fn.name + "'");
    fn.body_open = cur().begin;
    fn.body = block();
    fn.body_close = fn.body->end - 1;
    return fn;
  }

  // -- statements -------------------------------------------------------------

  StmtPtr new_stmt(StmtKind kind, const Token& first) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->loc = first.loc;
    s->begin = first.begin;
    return s;
  }

  StmtPtr block() {
    const Token& open = expect(Tok::LBrace);
    auto s = new_stmt(StmtKind::Block, open);
    while (!at(Tok::RBrace) && !at(Tok::Eof) && diags_.size() < kMaxDiagnostics) {
      try {
        s->stmts.push_back(statement());
      } catch (const ParseFailure&) {
        sync_statement();
      }
    }
    s->end = expect(Tok::RBrace, "to close the block").end;
    return s;
  }

  StmtPtr statement() {
    const Token& first = cur();
    switch (first.kind) {
      case Tok::PragmaBegin: return pragma_statement();
      case Tok::LBrace: return block();
      case Tok::KwInt:
      case Tok::KwDouble:
      case Tok::KwVoid: {
        auto s = declaration();
        s->end = expect(Tok::Semi, "after the declaration").end;
        return s;
      }
      case Tok::KwIf: return if_statement();
      case Tok::KwFor: return for_statement();
      case Tok::KwWhile: return while_statement();
      case Tok::KwReturn: {
        take();
        auto s = new_stmt(StmtKind::Return, first);
        if (!at(Tok::Semi)) s->value = expression();
        s->end = expect(Tok::Semi, "after the return statement").end;
        return s;
      }
      case Tok::KwUnsupported: fail(first.loc, "unsupported construct '" + first.text + "'");
      case Tok::Semi: fail(first.loc, "empty statement is not supported");
      default: {
        auto s = simple_statement();
        s->end = expect(Tok::Semi, "after the statement").end;
        return s;
      }
    }
  }

  StmtPtr pragma_statement() {
    const Token& hash = take();
    const Token& word = expect(Tok::Ident, "after '#perf'");
    if (word.text != "iterations") fail(word.loc, "unknown pragma '#perf " + word.text + "'");
    expect(Tok::LParen);
    IterationsPragma pragma{expression(), hash.loc};
    expect(Tok::RParen);
    expect(Tok::PragmaEnd, "at the end of the '#perf' line");
    if (!at(Tok::KwFor) && !at(Tok::KwWhile))
      fail(hash.loc, "'#perf iterations' must be followed by a for or while loop");
    auto loop = at(Tok::KwFor) ? for_statement() : while_statement();
    loop->pragma = std::move(pragma);
    return loop;
  }

  StmtPtr declaration() {
    const Token& first = cur();
    auto s = new_stmt(StmtKind::Decl, first);
    s->type = type_spec();
    const Token& name = expect(Tok::Ident, "for the variable name");
    if (at(Tok::LBracket)) fail(cur().loc, "unsupported construct: array declaration (use malloc)");
    s->name = name.text;
    s->name_begin = name.begin;
    s->loc = name.loc;
    s->end = name.end;
    if (accept(Tok::Assign)) {
      s->init = expression();
      s->end = s->init->end;
    }
    if (at(Tok::Comma)) fail(cur().loc, "unsupported construct: multiple declarators in one declaration");
    return s;
  }

  static bool assign_op(Tok t, AssignOp& op) {
    switch (t) {
      case Tok::Assign: op = AssignOp::Set; return true;
      case Tok::PlusAssign: op = AssignOp::Add; return true;
      case Tok::MinusAssign: op = AssignOp::Sub; return true;
      case Tok::StarAssign: op = AssignOp::Mul; return true;
      case Tok::SlashAssign: op = AssignOp::Div; return true;
      case Tok::PercentAssign: op = AssignOp::Mod; return true;
      default: return false;
    }
  }

  ExprPtr synthetic_one(const Token& at_tok) {
    auto one = std::make_unique<Expr>();
    one->kind = ExprKind::IntLit;
    one->int_value = 1;
    one->name = "1";
    one->loc = at_tok.loc;
    one->begin = at_tok.begin;
    one->end = at_tok.end;
    one->synthetic = true;
    return one;
  }

  // assignment, ++/--, or bare expression
  StmtPtr simple_statement() {
    const Token& first = cur();
    if (at(Tok::PlusPlus) || at(Tok::MinusMinus)) {
      const Token& op = take();
      auto s = new_stmt(StmtKind::Assign, first);
      s->target = unary();
      s->assign_op = op.kind == Tok::PlusPlus ? AssignOp::Add : AssignOp::Sub;
      s->value = synthetic_one(op);
      s->end = s->target->end;
      return s;
    }
    ExprPtr e = expression();
    AssignOp op;
    if (assign_op(cur().kind, op)) {
      take();
      auto s = new_stmt(StmtKind::Assign, first);
      s->loc = e->loc;
      s->target = std::move(e);
      s->assign_op = op;
      s->value = expression();
      s->end = s->value->end;
      return s;
    }
    if (at(Tok::PlusPlus) || at(Tok::MinusMinus)) {
      const Token& t = take();
      auto s = new_stmt(StmtKind::Assign, first);
      s->target = std::move(e);
      s->assign_op = t.kind == Tok::PlusPlus ? AssignOp::Add : AssignOp::Sub;
      s->value = synthetic_one(t);
      s->end = t.end;
      return s;
    }
    auto s = new_stmt(StmtKind::ExprStmt, first);
    s->end = e->end;
    s->value = std::move(e);
    return s;
  }

  StmtPtr if_statement() {
    const Token& kw = take();
    auto s = new_stmt(StmtKind::If, kw);
    expect(Tok::LParen);
    s->cond = expression();
    expect(Tok::RParen);
    s->then_branch = statement();
    s->end = s->then_branch->end;
    if (accept(Tok::KwElse)) {
      s->else_branch = statement();
      s->end = s->else_branch->end;
    }
    return s;
  }

  StmtPtr for_statement() {
    const Token& kw = take();
    auto s = new_stmt(StmtKind::For, kw);
    s->loop_id = loop_count_++;
    expect(Tok::LParen);
    if (at(Tok::KwInt) || at(Tok::KwDouble))
      s->for_init = declaration();
    else
      s->for_init = simple_statement();
    expect(Tok::Semi, "after the for-loop initializer");
    if (at(Tok::Semi)) fail(cur().loc, "unsupported construct: for loop without a condition");
    s->cond = expression();
    expect(Tok::Semi, "after the for-loop condition");
    s->for_step = simple_statement();
    s->header_end = expect(Tok::RParen, "to close the for-loop header").end;
    s->body = statement();
    s->end = s->body->end;
    return s;
  }

  StmtPtr while_statement() {
    const Token& kw = take();
    auto s = new_stmt(StmtKind::While, kw);
    s->loop_id = loop_count_++;
    expect(Tok::LParen);
    s->cond = expression();
    s->header_end = expect(Tok::RParen, "to close the while condition").end;
    s->body = statement();
    s->end = s->body->end;
    return s;
  }

  // -- expressions ------------------------------------------------------------

  ExprPtr new_expr(ExprKind kind, const Token& first) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->loc = first.loc;
    e->begin = first.begin;
    e->end = first.end;
    return e;
  }

  ExprPtr binary(ExprPtr lhs, BinaryOp op, ExprPtr rhs, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Binary;
    e->binary_op = op;
    e->loc = loc;
    e->begin = lhs->begin;
    e->end = rhs->end;
    e->operands.push_back(std::move(lhs));
    e->operands.push_back(std::move(rhs));
    return e;
  }

  ExprPtr expression() { return logical_or(); }

  ExprPtr logical_or() {
    auto e = logical_and();
    while (at(Tok::OrOr)) {
      SourceLoc loc = take().loc;
      e = binary(std::move(e), BinaryOp::Or, logical_and(), loc);
    }
    return e;
  }

  ExprPtr logical_and() {
    auto e = equality();
    while (at(Tok::AndAnd)) {
      SourceLoc loc = take().loc;
      e = binary(std::move(e), BinaryOp::And, equality(), loc);
    }
    return e;
  }

  ExprPtr equality() {
    auto e = relational();
    while (at(Tok::EqEq) || at(Tok::NotEq)) {
      const Token& op = take();
      e = binary(std::move(e), op.kind == Tok::EqEq ? BinaryOp::Eq : BinaryOp::Ne, relational(), op.loc);
    }
    return e;
  }

  ExprPtr relational() {
    auto e = additive();
    for (;;) {
      BinaryOp op;
      switch (cur().kind) {
        case Tok::Lt: op = BinaryOp::Lt; break;
        case Tok::Le: op = BinaryOp::Le; break;
        case Tok::Gt: op = BinaryOp::Gt; break;
        case Tok::Ge: op = BinaryOp::Ge; break;
        default: return e;
      }
      SourceLoc loc = take().loc;
      e = binary(std::move(e), op, additive(), loc);
    }
  }

  ExprPtr additive() {
    auto e = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const Token& op = take();
      e = binary(std::move(e), op.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, multiplicative(), op.loc);
    }
    return e;
  }

  ExprPtr multiplicative() {
    auto e = unary();
    for (;;) {
      BinaryOp op;
      switch (cur().kind) {
        case Tok::Star: op = BinaryOp::Mul; break;
        case Tok::Slash: op = BinaryOp::Div; break;
        case Tok::Percent: op = BinaryOp::Mod; break;
        default: return e;
      }
      SourceLoc loc = take().loc;
      e = binary(std::move(e), op, unary(), loc);
    }
  }

  ExprPtr unary() {
    const Token& first = cur();
    ExprKind kind = ExprKind::Unary;
    UnaryOp op = UnaryOp::Neg;
    switch (first.kind) {
      case Tok::Minus: op = UnaryOp::Neg; break;
      case Tok::Not: op = UnaryOp::Not; break;
      case Tok::Star: op = UnaryOp::Deref; break;
      case Tok::Amp: kind = ExprKind::AddressOf; break;
      case Tok::Plus: take(); return unary();
      case Tok::PlusPlus:
      case Tok::MinusMinus: fail(first.loc, "unsupported construct: increment inside an expression");
      default: return postfix();
    }
    take();
    auto e = new_expr(kind, first);
    e->unary_op = op;
    e->operands.push_back(unary());
    e->end = e->operands.back()->end;
    return e;
  }

  ExprPtr postfix() {
    auto e = primary();
    for (;;) {
      if (at(Tok::LBracket)) {
        SourceLoc loc = take().loc;
        auto idx = std::make_unique<Expr>();
        idx->kind = ExprKind::Index;
        idx->loc = loc;
        idx->begin = e->begin;
        idx->operands.push_back(std::move(e));
        idx->operands.push_back(expression());
        idx->end = expect(Tok::RBracket).end;
        e = std::move(idx);
      } else if (at(Tok::LParen)) {
        if (e->kind != ExprKind::Ident) fail(cur().loc, "unsupported construct: call through a non-name (function pointer)");
        take();
        e->kind = ExprKind::Call;
        if (!at(Tok::RParen)) {
          do {
            e->operands.push_back(expression());
          } while (accept(Tok::Comma));
        }
        e->end = expect(Tok::RParen, "to close the argument list").end;
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::IntLit: {
        take();
        auto e = new_expr(ExprKind::IntLit, t);
        e->int_value = t.int_value;
        e->name = t.text;
        return e;
      }
      case Tok::FloatLit: {
        take();
        auto e = new_expr(ExprKind::FloatLit, t);
        e->float_value = t.float_value;
        e->name = t.text;
        e->type = TypeKind::Double;
        return e;
      }
      case Tok::Ident: {
        take();
        auto e = new_expr(ExprKind::Ident, t);
        e->name = t.text;
        return e;
      }
      case Tok::KwSizeof: {
        take();
        auto e = new_expr(ExprKind::Sizeof, t);
        if (at(Tok::LParen) && (ahead(1).kind == Tok::KwInt || ahead(1).kind == Tok::KwDouble)) {
          take();
          e->sizeof_type = type_spec().kind;
          e->end = expect(Tok::RParen).end;
        } else {
          e->operands.push_back(unary());
          e->end = e->operands.back()->end;
        }
        return e;
      }
      case Tok::LParen: {
        take();
        if (at_type()) fail(cur().loc, "unsupported construct: cast");
        auto e = expression();
        const Token& close = expect(Tok::RParen);
        e->begin = t.begin;
        e->end = close.end;
        e->parenthesized = true;
        return e;
      }
      case Tok::KwUnsupported: fail(t.loc, "unsupported construct '" + t.text + "'");
      case Tok::Unsupported: fail(t.loc, "unsupported token '" + t.text + "'");
      default: fail(t.loc, "expected an expression, found " + describe(t));
    }
  }

  const std::string& src_;
  std::vector<Diagnostic>& diags_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int loop_count_ = 0;
};

// ---------------------------------------------------------------------------
// Name resolution and type checking.

const std::map<std::string_view, Builtin>& builtins() {
  static const std::map<std::string_view, Builtin> table = {
      {"malloc", Builtin::Malloc},
      {"free", Builtin::Free},
      {"MPI_Allreduce", Builtin::MpiAllreduce},
      {"MPI_Send", Builtin::MpiSend},
      {"MPI_Recv", Builtin::MpiRecv},
  };
  return table;
}

const std::set<std::string_view>& mpi_constants() {
  static const std::set<std::string_view> names = {"MPI_DOUBLE", "MPI_INT",  "MPI_SUM",       "MPI_MAX",
                                                   "MPI_MIN",    "MPI_PROD", "MPI_COMM_WORLD"};
  return names;
}

class Resolver {
 public:
  Resolver(Program& prog, std::vector<Diagnostic>& diags) : prog_(prog), diags_(diags) {}

  void run() {
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < prog_.functions.size(); ++i) {
      const Function& fn = prog_.functions[i];
      if (builtins().count(fn.name)) error(fn.loc, "'" + fn.name + "' is a builtin and cannot be redefined");
      if (!seen.emplace(fn.name, static_cast<int>(i)).second) error(fn.loc, "redefinition of function '" + fn.name + "'");
    }
    prog_.main_index = prog_.find_function("main");
    if (prog_.main_index < 0) {
      error({1, 1}, "program has no function named 'main'");
    } else {
      for (const Param& p : prog_.main().params)
        if (p.type.kind != TypeKind::Int) error(p.loc, "parameters of 'main' must have type int");
    }
    for (auto& fn : prog_.functions) function(fn);
  }

 private:
  void error(SourceLoc loc, std::string msg) { diags_.push_back({loc, Severity::Error, std::move(msg)}); }

  int declare(const std::string& name, TypeKind type, SourceLoc loc, bool is_param) {
    auto& scope = scopes_.back();
    if (scope.second.count(name)) error(loc, "redeclaration of '" + name + "'");
    int id = static_cast<int>(prog_.decls.size());
    prog_.decls.push_back(DeclInfo{fn_->name, name, scope.first, type, loc, is_param});
    scope.second[name] = id;
    return id;
  }

  int lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->second.find(name);
      if (f != it->second.end()) return f->second;
    }
    return -1;
  }

  void push_scope() { scopes_.emplace_back(next_scope_++, std::map<std::string, int>{}); }
  void pop_scope() { scopes_.pop_back(); }

  void function(Function& fn) {
    fn_ = &fn;
    push_scope();
    for (Param& p : fn.params) p.decl = declare(p.name, p.type.kind, p.loc, true);
    // The body block shares the parameter scope, as in C.
    for (auto& s : fn.body->stmts) statement(*s);
    pop_scope();
  }

  void check_assignable(TypeKind target, const Expr& value, SourceLoc loc) {
    if (target == TypeKind::Void) return;
    bool value_ptr = is_pointer(value.type);
    if (is_pointer(target)) {
      bool malloc_call = value.kind == ExprKind::Call && value.builtin == Builtin::Malloc;
      if (!malloc_call && value.type != target)
        error(loc, "cannot assign a value of type " + std::string(to_string(value.type)) + " to a " +
                       std::string(to_string(target)));
    } else if (value_ptr) {
      error(loc, "cannot assign a pointer to a " + std::string(to_string(target)));
    } else if (value.type == TypeKind::Void) {
      error(loc, "void value used in an expression");
    }
  }

  static void set_malloc_element(Expr& value, TypeKind pointer) {
    if (value.kind == ExprKind::Call && value.builtin == Builtin::Malloc) {
      value.malloc_element = element_type(pointer);
      value.type = pointer;
    }
  }

  void statement(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Decl:
        if (s.type.kind == TypeKind::Void) error(s.loc, "variable '" + s.name + "' declared void");
        // As in C, the name is in scope inside its own initializer.
        s.decl = declare(s.name, s.type.kind, s.loc, false);
        if (s.init) {
          expr(*s.init);
          set_malloc_element(*s.init, s.type.kind);
          check_assignable(s.type.kind, *s.init, s.init->loc);
        }
        break;
      case StmtKind::Assign: {
        expr(*s.target);
        expr(*s.value);
        if (s.target->kind != ExprKind::Ident && s.target->kind != ExprKind::Index) {
          error(s.target->loc, "assignment target must be a variable or an indexed element");
          break;
        }
        if (s.target->kind == ExprKind::Ident && s.target->decl < 0) break;
        TypeKind t = s.target->type;
        if (s.assign_op != AssignOp::Set && is_pointer(t)) {
          error(s.loc, "unsupported construct: pointer arithmetic");
          break;
        }
        if (s.assign_op == AssignOp::Mod && t == TypeKind::Double) error(s.loc, "'%' requires integer operands");
        set_malloc_element(*s.value, t);
        check_assignable(t, *s.value, s.value->loc);
        break;
      }
      case StmtKind::If:
        condition(*s.cond);
        scoped(*s.then_branch);
        if (s.else_branch) scoped(*s.else_branch);
        break;
      case StmtKind::For:
        push_scope();
        if (s.pragma) expr(*s.pragma->count);
        statement(*s.for_init);
        condition(*s.cond);
        statement(*s.for_step);
        scoped(*s.body);
        pop_scope();
        break;
      case StmtKind::While:
        if (s.pragma) expr(*s.pragma->count);
        condition(*s.cond);
        scoped(*s.body);
        break;
      case StmtKind::Return:
        if (s.value) {
          expr(*s.value);
          if (fn_->return_type.kind == TypeKind::Void)
            error(s.loc, "void function '" + fn_->name + "' cannot return a value");
          else
            check_assignable(fn_->return_type.kind, *s.value, s.value->loc);
        } else if (fn_->return_type.kind != TypeKind::Void) {
          error(s.loc, "non-void function '" + fn_->name + "' must return a value");
        }
        break;
      case StmtKind::Block:
        push_scope();
        for (auto& inner : s.stmts) statement(*inner);
        pop_scope();
        break;
      case StmtKind::ExprStmt:
        expr(*s.value);
        break;
    }
  }

  void scoped(Stmt& s) {
    if (s.kind == StmtKind::Block) {
      statement(s);
      return;
    }
    push_scope();
    statement(s);
    pop_scope();
  }

  void condition(Expr& e) {
    expr(e);
    if (is_pointer(e.type) || e.type == TypeKind::Void) error(e.loc, "condition must be an int or double expression");
  }

  void expr(Expr& e, bool builtin_arg = false, bool in_sizeof = false) {
    switch (e.kind) {
      case ExprKind::IntLit: e.type = TypeKind::Int; break;
      case ExprKind::FloatLit: e.type = TypeKind::Double; break;
      case ExprKind::MpiConstant: e.type = TypeKind::Int; break;
      case ExprKind::Ident: {
        if (mpi_constants().count(e.name)) {
          e.kind = ExprKind::MpiConstant;
          e.type = TypeKind::Int;
          break;
        }
        e.decl = lookup(e.name);
        if (e.decl < 0) {
          error(e.loc, "use of undeclared identifier '" + e.name + "'");
          break;
        }
        e.type = prog_.decls[static_cast<std::size_t>(e.decl)].type;
        break;
      }
      case ExprKind::Binary: {
        expr(*e.operands[0]);
        expr(*e.operands[1]);
        TypeKind a = e.operands[0]->type, b = e.operands[1]->type;
        if (is_pointer(a) || is_pointer(b)) {
          error(e.loc, "unsupported construct: pointer arithmetic or comparison");
          break;
        }
        if (a == TypeKind::Void || b == TypeKind::Void) {
          error(e.loc, "void value used in an expression");
          break;
        }
        switch (e.binary_op) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul:
          case BinaryOp::Div:
            e.type = (a == TypeKind::Double || b == TypeKind::Double) ? TypeKind::Double : TypeKind::Int;
            break;
          case BinaryOp::Mod:
            if (a == TypeKind::Double || b == TypeKind::Double) error(e.loc, "'%' requires integer operands");
            e.type = TypeKind::Int;
            break;
          default: e.type = TypeKind::Int; break;
        }
        break;
      }
      case ExprKind::Unary: {
        Expr& operand = *e.operands[0];
        if (e.unary_op == UnaryOp::Deref) {
          if (!in_sizeof) {
            error(e.loc, "unsupported construct: pointer dereference (use indexing)");
            break;
          }
          expr(operand);
          if (!is_pointer(operand.type)) error(e.loc, "dereference of a non-pointer");
          e.type = element_type(operand.type);
          break;
        }
        expr(operand);
        if (is_pointer(operand.type) || operand.type == TypeKind::Void)
          error(e.loc, "unary operator needs an int or double operand");
        e.type = e.unary_op == UnaryOp::Not ? TypeKind::Int : operand.type;
        break;
      }
      case ExprKind::AddressOf: {
        if (!builtin_arg) {
          error(e.loc, "unsupported construct: address-of outside an MPI call argument");
          break;
        }
        Expr& operand = *e.operands[0];
        if (operand.kind != ExprKind::Ident) {
          error(e.loc, "address-of requires a variable name");
          break;
        }
        expr(operand);
        if (is_pointer(operand.type)) error(e.loc, "address-of a pointer variable is not supported");
        e.type = operand.type == TypeKind::Int ? TypeKind::IntPtr : TypeKind::DoublePtr;
        break;
      }
      case ExprKind::Index: {
        expr(*e.operands[0]);
        expr(*e.operands[1]);
        if (!is_pointer(e.operands[0]->type)) {
          error(e.loc, "indexing requires a pointer");
          break;
        }
        if (e.operands[1]->type != TypeKind::Int) error(e.operands[1]->loc, "index must be an int");
        e.type = element_type(e.operands[0]->type);
        break;
      }
      case ExprKind::Sizeof:
        if (!e.sizeof_type) {
          Expr& operand = *e.operands[0];
          expr(operand, false, true);
          e.sizeof_type = operand.type;
        }
        e.type = TypeKind::Int;
        break;
      case ExprKind::Call: call(e); break;
    }
  }

  void expect_arity(const Expr& e, std::size_t n) {
    if (e.operands.size() != n)
      error(e.loc, "'" + e.name + "' expects " + std::to_string(n) + " arguments, got " +
                       std::to_string(e.operands.size()));
  }

  void call(Expr& e) {
    auto b = builtins().find(e.name);
    if (b != builtins().end()) {
      e.builtin = b->second;
      switch (e.builtin) {
        case Builtin::Malloc:
          expect_arity(e, 1);
          for (auto& a : e.operands) expr(*a);
          if (!e.operands.empty() && e.operands[0]->type != TypeKind::Int)
            error(e.operands[0]->loc, "malloc size must be an int");
          e.type = TypeKind::DoublePtr;
          break;
        case Builtin::Free:
          expect_arity(e, 1);
          for (auto& a : e.operands) expr(*a);
          if (!e.operands.empty() && (e.operands[0]->kind != ExprKind::Ident || !is_pointer(e.operands[0]->type)))
            error(e.operands[0]->loc, "free expects a pointer variable");
          e.type = TypeKind::Void;
          break;
        default: {
          std::size_t buffers = e.builtin == Builtin::MpiAllreduce ? 2 : 1;
          expect_arity(e, 6);
          for (std::size_t i = 0; i < e.operands.size(); ++i) {
            Expr& a = *e.operands[i];
            expr(a, i < buffers);
            if (i < buffers && a.kind != ExprKind::AddressOf && !(a.kind == ExprKind::Ident && is_pointer(a.type)))
              error(a.loc, "MPI buffer argument must be '&variable' or a pointer variable");
          }
          std::size_t dt = buffers + 1;
          if (e.operands.size() > dt) {
            const Expr& d = *e.operands[dt];
            if (d.kind != ExprKind::MpiConstant || (d.name != "MPI_DOUBLE" && d.name != "MPI_INT"))
              error(d.loc, "MPI datatype must be MPI_DOUBLE or MPI_INT");
          }
          e.type = TypeKind::Int;
          break;
        }
      }
      return;
    }
    e.callee = prog_.find_function(e.name);
    for (auto& a : e.operands) expr(*a);
    if (e.callee < 0) {
      error(e.loc, "call to undeclared function '" + e.name + "'");
      return;
    }
    const Function& fn = prog_.functions[static_cast<std::size_t>(e.callee)];
    if (fn.params.size() != e.operands.size()) {
      expect_arity(e, fn.params.size());
      return;
    }
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      set_malloc_element(*e.operands[i], fn.params[i].type.kind);
      check_assignable(fn.params[i].type.kind, *e.operands[i], e.operands[i]->loc);
    }
    e.type = fn.return_type.kind;
  }

  Program& prog_;
  std::vector<Diagnostic>& diags_;
  const Function* fn_ = nullptr;
  std::vector<std::pair<int, std::map<std::string, int>>> scopes_;
  int next_scope_ = 0;
};

}  // namespace

ParseOutcome parse_program(std::string source) {
  ParseOutcome out;
  Program prog;
  prog.source = std::move(source);
  {
    Parser parser(prog.source, out.diagnostics);
    Program parsed = parser.run();
    prog.functions = std::move(parsed.functions);
    prog.loop_count = parsed.loop_count;
  }
  if (out.diagnostics.empty()) Resolver(prog, out.diagnostics).run();
  if (out.diagnostics.empty()) out.program = std::move(prog);
  return out;
}

Program parse(std::string source) {
  ParseOutcome out = parse_program(std::move(source));
  if (!out.program) throw DiagnosticError(std::move(out.diagnostics));
  return std::move(*out.program);
}

}  // namespace perfscope
