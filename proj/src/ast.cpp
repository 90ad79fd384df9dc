#include "perfscope/ast.hpp"

namespace perfscope {

std::string_view to_string(TypeKind t) {
  switch (t) {
    case TypeKind::Int: return "int";
    case TypeKind::Double: return "double";
    case TypeKind::Void: return "void";
    case TypeKind::IntPtr: return "int*";
    case TypeKind::DoublePtr: return "double*";
  }
  return "?";
}

bool is_pointer(TypeKind t) { return t == TypeKind::IntPtr || t == TypeKind::DoublePtr; }

TypeKind element_type(TypeKind ptr) { return ptr == TypeKind::IntPtr ? TypeKind::Int : TypeKind::Double; }

std::int64_t size_of(TypeKind t) {
  switch (t) {
    case TypeKind::Int: return 4;
    case TypeKind::Double: return 8;
    case TypeKind::Void: return 1;
    case TypeKind::IntPtr:
    case TypeKind::DoublePtr: return 8;
  }
  return 0;
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->loc = loc;
  e->begin = begin;
  e->end = end;
  e->synthetic = synthetic;
  e->parenthesized = parenthesized;
  e->int_value = int_value;
  e->float_value = float_value;
  e->name = name;
  e->binary_op = binary_op;
  e->unary_op = unary_op;
  for (const auto& op : operands) e->operands.push_back(op->clone());
  e->sizeof_type = sizeof_type;
  e->decl = decl;
  e->callee = callee;
  e->builtin = builtin;
  e->type = type;
  e->malloc_element = malloc_element;
  return e;
}

int Program::find_function(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name) return static_cast<int>(i);
  return -1;
}

int Program::find_decl(std::string_view function, std::string_view name) const {
  for (std::size_t i = 0; i < decls.size(); ++i)
    if (decls[i].function == function && decls[i].name == name) return static_cast<int>(i);
  return -1;
}

}  // namespace perfscope
