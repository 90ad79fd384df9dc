#include "perfscope/term.hpp"

#include <algorithm>
#include <cctype>

#include "perfscope/diagnostics.hpp"

namespace perfscope {

std::string to_string(const Rational& q) {
  std::string out = boost::multiprecision::numerator(q).str();
  const BigInt den = boost::multiprecision::denominator(q);
  if (den != 1) out += "/" + den.str();
  return out;
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!std::isalpha(head) && head != '_') return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::variable(std::string name, int exponent) {
  Monomial m;
  m.set(name, exponent);
  return m;
}

void Monomial::set(const std::string& name, int exponent) {
  if (exponent == 0)
    exps_.erase(name);
  else
    exps_[name] = exponent;
}

int Monomial::exponent(std::string_view name) const {
  auto it = exps_.find(name);
  return it == exps_.end() ? 0 : it->second;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [_, e] : exps_) d += e;
  return d;
}

bool Monomial::divides(const Monomial& other) const {
  for (const auto& [v, e] : exps_)
    if (other.exponent(v) < e) return false;
  return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out = *this;
  for (const auto& [v, e] : other.exps_) out.set(v, out.exponent(v) + e);
  return out;
}

Monomial Monomial::operator/(const Monomial& other) const {
  Monomial out = *this;
  for (const auto& [v, e] : other.exps_) out.set(v, out.exponent(v) - e);
  return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  for (const auto& [v, e] : a.exps_) {
    int f = b.exponent(v);
    if (f > 0) out.set(v, std::min(e, f));
  }
  return out;
}

namespace {

// Lexicographic comparison of exponent vectors over the union of variables,
// walked in ascending `rank` order. Returns <0, 0, >0.
template <class Rank>
int lex_compare(const Monomial& a, const Monomial& b, Rank rank) {
  std::vector<std::string_view> vars;
  for (const auto& [v, _] : a.exponents()) vars.push_back(v);
  for (const auto& [v, _] : b.exponents()) vars.push_back(v);
  std::sort(vars.begin(), vars.end(), [&](std::string_view x, std::string_view y) { return rank(x, y) < 0; });
  for (std::string_view v : vars) {
    int ea = a.exponent(v), eb = b.exponent(v);
    if (ea != eb) return ea < eb ? -1 : 1;
  }
  return 0;
}

int alpha_rank(std::string_view x, std::string_view y) { return x.compare(y); }

}  // namespace

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return lex_compare(a, b, alpha_rank) < 0;
}

int VarOrder::compare_vars(std::string_view a, std::string_view b) const {
  auto pos = [&](std::string_view v) {
    auto it = std::find(names.begin(), names.end(), v);
    return static_cast<std::size_t>(it - names.begin());
  };
  std::size_t pa = pos(a), pb = pos(b);
  if (pa != pb) return pa < pb ? -1 : 1;
  return a.compare(b);
}

bool VarOrder::less(const Monomial& a, const Monomial& b) const {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return lex_compare(a, b, [this](std::string_view x, std::string_view y) { return compare_vars(x, y); }) < 0;
}

namespace {

// "n^2*m" with variables in display order; empty string for the unit monomial.
std::string format_monomial(const Monomial& m, const VarOrder& order, bool absolute = false) {
  std::vector<std::pair<std::string_view, int>> vars(m.exponents().begin(), m.exponents().end());
  std::sort(vars.begin(), vars.end(),
            [&](const auto& x, const auto& y) { return order.compare_vars(x.first, y.first) < 0; });
  std::string out;
  for (const auto& [v, e] : vars) {
    int shown = absolute ? std::abs(e) : e;
    if (!out.empty()) out += "*";
    out += v;
    if (shown != 1) out += "^" + std::to_string(shown);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Polynomial::Polynomial(const Monomial& m, const Rational& c) {
  if (c != 0) terms_.emplace(m, c);
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

int Polynomial::degree() const { return terms_.empty() ? 0 : leading_monomial().degree(); }

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial g = terms_.begin()->first;
  for (const auto& [m, _] : terms_) g = Monomial::gcd(g, m);
  return g;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Polynomial Polynomial::operator-() const { return scaled(-1); }

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial out;
  if (c == 0) return out;
  for (const auto& [m, coeff] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, coeff * c);
  return out;
}

Polynomial Polynomial::divided_by(const Monomial& m) const {
  Polynomial out;
  for (const auto& [mono, c] : terms_) out.terms_.emplace(mono / m, c);
  return out;
}

std::optional<Polynomial> Polynomial::exact_quotient(const Polynomial& divisor) const {
  const Monomial& dlm = divisor.leading_monomial();
  const Rational& dlc = divisor.leading_coefficient();
  Polynomial rem = *this;
  Polynomial quot;
  // Single-divisor reduction: the leading term must stay divisible, else the
  // remainder is nonzero.
  while (!rem.is_zero()) {
    const Monomial lm = rem.leading_monomial();
    if (!dlm.divides(lm)) return std::nullopt;
    Polynomial step(lm / dlm, rem.leading_coefficient() / dlc);
    quot += step;
    rem -= step * divisor;
  }
  return quot;
}

Rational Polynomial::evaluate(const Assignment& assignment) const {
  Rational sum = 0;
  for (const auto& [m, c] : terms_) {
    Rational prod = c;
    for (const auto& [v, e] : m.exponents()) {
      auto it = assignment.find(v);
      if (it == assignment.end()) throw Error(ErrorKind::UnboundVariable, "unbound variable '" + v + "'");
      for (int i = 0; i < e; ++i) prod *= it->second;
    }
    sum += prod;
  }
  return sum;
}

std::string Polynomial::format(const VarOrder& order) const {
  if (terms_.empty()) return "0";
  std::vector<const Terms::value_type*> sorted;
  for (const auto& t : terms_) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(), [&](auto* x, auto* y) { return order.less(y->first, x->first); });

  std::string out;
  for (const auto* t : sorted) {
    const auto& [m, c] = *t;
    bool negative = c < 0;
    Rational mag = negative ? Rational(-c) : c;
    if (out.empty())
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    std::string mono = format_monomial(m, order);
    if (mono.empty())
      out += to_string(mag);
    else if (mag == 1)
      out += mono;
    else
      out += to_string(mag) + "*" + mono;
  }
  return out;
}

// ---------------------------------------------------------------------------
// BigO

std::string BigO::format(const VarOrder& order) const {
  Monomial up, down;
  for (const auto& [v, e] : dominant.exponents()) {
    if (e > 0)
      up = up * Monomial::variable(v, e);
    else
      down = down * Monomial::variable(v, -e);
  }
  std::string top = up.is_one() ? "1" : format_monomial(up, order);
  if (down.is_one()) return "O(" + top + ")";
  std::string bottom = format_monomial(down, order);
  if (down.exponents().size() > 1) bottom = "(" + bottom + ")";
  return "O(" + top + "/" + bottom + ")";
}

// ---------------------------------------------------------------------------
// Term

Term::Term(const Rational& q) : num_(q) {}

Term::Term(Polynomial p) : num_(std::move(p)) {}

Term Term::variable(std::string_view name) {
  if (!is_identifier(name))
    throw Error(ErrorKind::InvalidVariable, "invalid variable name '" + std::string(name) + "'");
  return Term(Polynomial(Monomial::variable(std::string(name))));
}

Term Term::ratio(Polynomial n, Polynomial d) {
  if (d.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by zero term");
  Term t;
  if (n.is_zero()) return t;

  Monomial common = Monomial::gcd(n.monomial_content(), d.monomial_content());
  if (!common.is_one()) {
    n = n.divided_by(common);
    d = d.divided_by(common);
  }
  if (!d.is_constant()) {
    if (auto q = n.exact_quotient(d)) {
      n = std::move(*q);
      d = Polynomial(Rational(1));
    } else if (auto r = d.exact_quotient(n); r && !n.is_constant()) {
      d = std::move(*r);
      n = Polynomial(Rational(1));
    }
  }
  Rational lc = d.leading_coefficient();
  if (lc != 1) {
    n = n.scaled(1 / lc);
    d = d.scaled(1 / lc);
  }
  t.num_ = std::move(n);
  t.den_ = std::move(d);
  return t;
}

Rational Term::constant_value() const { return num_.constant_value() / den_.constant_value(); }

Term& Term::operator+=(const Term& b) {
  if (b.is_zero()) return *this;
  if (den_ == b.den_) {
    if (den_.is_constant()) {
      num_ += b.num_;
      return *this;
    }
    return *this = ratio(num_ + b.num_, den_);
  }
  return *this = ratio(num_ * b.den_ + b.num_ * den_, den_ * b.den_);
}

Term& Term::operator-=(const Term& b) { return *this += -b; }

Term& Term::operator*=(const Term& b) {
  if (is_polynomial() && b.is_polynomial()) {
    num_ = num_ * b.num_;
    return *this;
  }
  return *this = ratio(num_ * b.num_, den_ * b.den_);
}

Term& Term::operator/=(const Term& b) {
  if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by zero term");
  return *this = ratio(num_ * b.den_, den_ * b.num_);
}

Term Term::operator-() const {
  Term t = *this;
  t.num_ = -t.num_;
  return t;
}

bool operator==(const Term& a, const Term& b) {
  if (a.same_form(b)) return true;
  return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
}

Term term_const(const Rational& q) { return Term(q); }

Term term_var(std::string_view name) { return Term::variable(name); }

Rational evaluate(const Term& t, const Assignment& assignment) {
  Rational den = t.denominator().evaluate(assignment);
  if (den == 0) throw Error(ErrorKind::EvaluationSingularity, "term denominator evaluates to zero");
  return t.numerator().evaluate(assignment) / den;
}

BigO big_o(const Term& t) {
  if (t.is_zero()) return BigO{Monomial{}, true};
  return BigO{t.numerator().leading_monomial() / t.denominator().leading_monomial(), false};
}

std::string format(const Term& t, const VarOrder& order) {
  if (t.is_polynomial()) return t.numerator().format(order);
  return "(" + t.numerator().format(order) + ")/(" + t.denominator().format(order) + ")";
}

}  // namespace perfscope
