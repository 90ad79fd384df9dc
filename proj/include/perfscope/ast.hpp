#pragma once

// PerfC abstract syntax tree. Every node records its source location and the
// byte range it covers so the instrumented-source emitter can rewrite the
// original text in place.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perfscope/diagnostics.hpp"

namespace perfscope {

enum class TypeKind { Int, Double, Void, IntPtr, DoublePtr };

std::string_view to_string(TypeKind t);
bool is_pointer(TypeKind t);
TypeKind element_type(TypeKind ptr);
std::int64_t size_of(TypeKind t);

struct TypeSpec {
  TypeKind kind = TypeKind::Int;
  SourceLoc loc;
  std::size_t begin = 0;  // covers the keyword and any '*'
  std::size_t end = 0;
};

enum class ExprKind { IntLit, FloatLit, Ident, MpiConstant, Binary, Unary, Index, Call, Sizeof, AddressOf };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp { Neg, Not, Deref };
enum class Builtin { None, Malloc, Free, MpiAllreduce, MpiSend, MpiRecv };

std::string_view to_string(BinaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceLoc loc;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool synthetic = false;  // built by analysis, has no source text
  bool parenthesized = false;

  std::int64_t int_value = 0;
  double float_value = 0.0;
  std::string name;  // identifier, callee, MPI constant, or literal spelling

  BinaryOp binary_op = BinaryOp::Add;
  UnaryOp unary_op = UnaryOp::Neg;
  std::vector<ExprPtr> operands;  // binary: lhs, rhs; unary/sizeof: operand; index: base, index; call: arguments
  std::optional<TypeKind> sizeof_type;

  // Filled in by name resolution.
  int decl = -1;
  int callee = -1;
  Builtin builtin = Builtin::None;
  TypeKind type = TypeKind::Int;
  TypeKind malloc_element = TypeKind::Double;

  ExprPtr clone() const;
};

enum class StmtKind { Decl, Assign, If, For, While, Return, Block, ExprStmt };
enum class AssignOp { Set, Add, Sub, Mul, Div, Mod };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

/// "#perf iterations(expr)" attached to the loop that follows it.
struct IterationsPragma {
  ExprPtr count;
  SourceLoc loc;
};

struct Stmt {
  StmtKind kind = StmtKind::ExprStmt;
  SourceLoc loc;
  std::size_t begin = 0;
  std::size_t end = 0;

  // Decl
  TypeSpec type;
  std::string name;
  std::size_t name_begin = 0;
  int decl = -1;
  ExprPtr init;

  // Assign: target op= value. ++/-- are Add/Sub with a synthetic literal 1.
  ExprPtr target;
  AssignOp assign_op = AssignOp::Set;
  ExprPtr value;  // also: Return value, ExprStmt expression

  // If / For / While
  ExprPtr cond;
  StmtPtr then_branch;
  StmtPtr else_branch;
  StmtPtr for_init;
  StmtPtr for_step;
  StmtPtr body;
  std::size_t header_end = 0;  // just past the ')' closing the loop header
  int loop_id = -1;
  std::optional<IterationsPragma> pragma;

  // Block
  std::vector<StmtPtr> stmts;
};

struct Param {
  TypeSpec type;
  std::string name;
  std::size_t name_begin = 0;
  SourceLoc loc;
  int decl = -1;
};

struct Function {
  TypeSpec return_type;
  std::string name;
  std::size_t name_begin = 0;
  SourceLoc loc;
  std::vector<Param> params;
  StmtPtr body;  // Block
  std::size_t body_open = 0;   // offset of '{'
  std::size_t body_close = 0;  // offset of the matching '}'
};

struct DeclInfo {
  std::string function;
  std::string name;
  int scope = 0;
  TypeKind type = TypeKind::Int;
  SourceLoc loc;
  bool is_param = false;
};

struct Program {
  std::string source;
  std::vector<Function> functions;
  std::vector<DeclInfo> decls;
  int loop_count = 0;
  int main_index = -1;

  const Function& main() const { return functions.at(static_cast<std::size_t>(main_index)); }
  int find_function(std::string_view name) const;
  /// First declaration of `name` inside `function`, or -1.
  int find_decl(std::string_view function, std::string_view name) const;
};

}  // namespace perfscope
