#include "perfscope/lexer.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace perfscope {

std::string_view to_string(Tok t) {
  switch (t) {
    case Tok::Eof: return "end of file";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::FloatLit: return "floating-point literal";
    case Tok::KwInt: return "'int'";
    case Tok::KwDouble: return "'double'";
    case Tok::KwVoid: return "'void'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwFor: return "'for'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwSizeof: return "'sizeof'";
    case Tok::KwUnsupported: return "unsupported keyword";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Not: return "'!'";
    case Tok::Amp: return "'&'";
    case Tok::Assign: return "'='";
    case Tok::PlusAssign: return "'+='";
    case Tok::MinusAssign: return "'-='";
    case Tok::StarAssign: return "'*='";
    case Tok::SlashAssign: return "'/='";
    case Tok::PercentAssign: return "'%='";
    case Tok::PlusPlus: return "'++'";
    case Tok::MinusMinus: return "'--'";
    case Tok::Unsupported: return "unsupported token";
    case Tok::PragmaBegin: return "'#perf'";
    case Tok::PragmaEnd: return "end of pragma line";
  }
  return "token";
}

namespace {

const std::map<std::string_view, Tok>& keywords() {
  static const std::map<std::string_view, Tok> table = {
      {"int", Tok::KwInt},         {"double", Tok::KwDouble},         {"void", Tok::KwVoid},
      {"if", Tok::KwIf},           {"else", Tok::KwElse},             {"for", Tok::KwFor},
      {"while", Tok::KwWhile},     {"return", Tok::KwReturn},         {"sizeof", Tok::KwSizeof},
      {"break", Tok::KwUnsupported}, {"continue", Tok::KwUnsupported}, {"goto", Tok::KwUnsupported},
      {"do", Tok::KwUnsupported},  {"switch", Tok::KwUnsupported},    {"case", Tok::KwUnsupported},
      {"struct", Tok::KwUnsupported}, {"union", Tok::KwUnsupported},  {"typedef", Tok::KwUnsupported},
      {"float", Tok::KwUnsupported}, {"long", Tok::KwUnsupported},    {"char", Tok::KwUnsupported},
      {"unsigned", Tok::KwUnsupported}, {"const", Tok::KwUnsupported}, {"static", Tok::KwUnsupported},
      {"extern", Tok::KwUnsupported},
  };
  return table;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia(out);
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    if (in_pragma_) out.push_back(make(Tok::PragmaEnd, pos_, pos_));
    out.push_back(make(Tok::Eof, pos_, pos_));
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  SourceLoc loc_at(std::size_t offset) const {
    return {line_, static_cast<int>(offset - line_start_) + 1};
  }

  Token make(Tok kind, std::size_t begin, std::size_t end) {
    Token t;
    t.kind = kind;
    t.begin = begin;
    t.end = end;
    t.text = std::string(src_.substr(begin, end - begin));
    t.loc = begin_loc_.valid() ? begin_loc_ : loc_at(begin);
    begin_loc_ = {};
    return t;
  }

  void error(SourceLoc loc, std::string msg) { diags_.push_back({loc, Severity::Error, std::move(msg)}); }

  void skip_trivia(std::vector<Token>& out) {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == '\n') {
        if (in_pragma_) {
          begin_loc_ = loc_at(pos_);
          out.push_back(make(Tok::PragmaEnd, pos_, pos_));
          in_pragma_ = false;
        }
        advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        std::size_t p = pos_ + 2;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) ++p;
        if (!in_pragma_ && src_.substr(p, 5) == "#perf") {
          while (pos_ < p) advance();
          return;
        }
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        SourceLoc start = loc_at(pos_);
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) {
          error(start, "unterminated block comment");
          return;
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token next() {
    std::size_t begin = pos_;
    begin_loc_ = loc_at(begin);
    char c = peek();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      std::string_view word = src_.substr(begin, pos_ - begin);
      auto it = keywords().find(word);
      return make(it == keywords().end() ? Tok::Ident : it->second, begin, pos_);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return number(begin);
    if (c == '#') {
      SourceLoc here = begin_loc_;
      advance();
      if (src_.substr(pos_, 4) == "perf" && !std::isalnum(static_cast<unsigned char>(peek(4)))) {
        for (int i = 0; i < 4; ++i) advance();
        in_pragma_ = true;
        begin_loc_ = here;
        return make(Tok::PragmaBegin, begin, pos_);
      }
      begin_loc_ = here;
      return make(Tok::Unsupported, begin, pos_);
    }

    auto two = [&](char second, Tok yes, Tok no) {
      advance();
      if (peek() == second) {
        advance();
        return make(yes, begin, pos_);
      }
      return make(no, begin, pos_);
    };

    switch (c) {
      case '(': advance(); return make(Tok::LParen, begin, pos_);
      case ')': advance(); return make(Tok::RParen, begin, pos_);
      case '{': advance(); return make(Tok::LBrace, begin, pos_);
      case '}': advance(); return make(Tok::RBrace, begin, pos_);
      case '[': advance(); return make(Tok::LBracket, begin, pos_);
      case ']': advance(); return make(Tok::RBracket, begin, pos_);
      case ';': advance(); return make(Tok::Semi, begin, pos_);
      case ',': advance(); return make(Tok::Comma, begin, pos_);
      case '+':
        advance();
        if (peek() == '+') { advance(); return make(Tok::PlusPlus, begin, pos_); }
        if (peek() == '=') { advance(); return make(Tok::PlusAssign, begin, pos_); }
        return make(Tok::Plus, begin, pos_);
      case '-':
        advance();
        if (peek() == '-') { advance(); return make(Tok::MinusMinus, begin, pos_); }
        if (peek() == '=') { advance(); return make(Tok::MinusAssign, begin, pos_); }
        if (peek() == '>') { advance(); return make(Tok::Unsupported, begin, pos_); }
        return make(Tok::Minus, begin, pos_);
      case '*': return two('=', Tok::StarAssign, Tok::Star);
      case '/': return two('=', Tok::SlashAssign, Tok::Slash);
      case '%': return two('=', Tok::PercentAssign, Tok::Percent);
      case '<': return two('=', Tok::Le, Tok::Lt);
      case '>': return two('=', Tok::Ge, Tok::Gt);
      case '=': return two('=', Tok::EqEq, Tok::Assign);
      case '!': return two('=', Tok::NotEq, Tok::Not);
      case '&': return two('&', Tok::AndAnd, Tok::Amp);
      case '|': return two('|', Tok::OrOr, Tok::Unsupported);
      default: advance(); return make(Tok::Unsupported, begin, pos_);
    }
  }

  Token number(std::size_t begin) {
    bool is_float = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.') {
      is_float = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      std::size_t digits = 1;
      if (peek(1) == '+' || peek(1) == '-') digits = 2;
      if (std::isdigit(static_cast<unsigned char>(peek(digits)))) {
        is_float = true;
        for (std::size_t i = 0; i < digits; ++i) advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      } else {
        pos_ = save;
      }
    }
    Token t = make(is_float ? Tok::FloatLit : Tok::IntLit, begin, pos_);
    if (is_float) {
      t.float_value = std::stod(t.text);
    } else {
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
      if (ec != std::errc()) error(t.loc, "integer literal '" + t.text + "' does not fit in 64 bits");
    }
    return t;
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  SourceLoc begin_loc_;
  bool in_pragma_ = false;
};

}  // namespace

std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diags) {
  return Lexer(source, diags).run();
}

}  // namespace perfscope
