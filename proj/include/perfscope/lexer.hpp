#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "perfscope/diagnostics.hpp"

namespace perfscope {

enum class Tok {
  Eof,
  Ident,
  IntLit,
  FloatLit,
  // keywords
  KwInt,
  KwDouble,
  KwVoid,
  KwIf,
  KwElse,
  KwFor,
  KwWhile,
  KwReturn,
  KwSizeof,
  KwUnsupported,  // break, continue, goto, struct, ...
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  NotEq,
  AndAnd,
  OrOr,
  Not,
  Amp,
  Assign,
  PlusAssign,
  MinusAssign,
  StarAssign,
  SlashAssign,
  PercentAssign,
  PlusPlus,
  MinusMinus,
  Unsupported,  // '.', '->', '?', '|', ...
  // "#perf" opens a pragma that runs to the end of its line
  PragmaBegin,
  PragmaEnd,
};

std::string_view to_string(Tok t);

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  SourceLoc loc;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::int64_t int_value = 0;
  double float_value = 0.0;
};

/// Tokenizes a whole PerfC source. Comments are skipped except a "//" comment
/// whose text starts with "#perf", which lexes like a bare "#perf" line.
/// Lexical errors are appended to `diags`.
std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diags);

}  // namespace perfscope
