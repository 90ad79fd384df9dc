#pragma once

// Exact symbolic algebra over input-size variables: multivariate rational
// functions with arbitrary-precision rational coefficients.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace perfscope {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using Assignment = std::map<std::string, Rational, std::less<>>;

std::string to_string(const Rational& q);

bool is_identifier(std::string_view name);

/// Power product of named variables. Absent variables have exponent 0 and are
/// never stored. Exponents are non-negative inside polynomials; big-O results
/// may carry negative exponents.
class Monomial {
 public:
  Monomial() = default;
  static Monomial variable(std::string name, int exponent = 1);

  const std::map<std::string, int, std::less<>>& exponents() const { return exps_; }
  int exponent(std::string_view name) const;
  int degree() const;
  bool is_one() const { return exps_.empty(); }

  bool divides(const Monomial& other) const;
  Monomial operator*(const Monomial& other) const;
  /// Exponent difference; may go negative.
  Monomial operator/(const Monomial& other) const;
  /// Componentwise minimum exponent.
  static Monomial gcd(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  void set(const std::string& name, int exponent);

  std::map<std::string, int, std::less<>> exps_;
};

/// Graded-lexicographic order: total degree first, then lexicographic with
/// variables ranked by sorted name ("a" outranks "b").
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Variable ranking used only for rendering. Variables listed come first, in
/// the given order; the rest follow sorted by name.
struct VarOrder {
  std::vector<std::string> names;

  int compare_vars(std::string_view a, std::string_view b) const;
  bool less(const Monomial& a, const Monomial& b) const;  // grlex under this ranking
};

class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, GrlexLess>;

  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT(google-explicit-constructor)
  Polynomial(const Monomial& m, const Rational& c = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // 0 for the zero polynomial
  int degree() const;

  /// Highest monomial under GrlexLess. Requires a nonzero polynomial.
  const Monomial& leading_monomial() const { return terms_.rbegin()->first; }
  const Rational& leading_coefficient() const { return terms_.rbegin()->second; }
  /// Largest monomial dividing every term (the empty monomial for zero).
  Monomial monomial_content() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;

  Polynomial scaled(const Rational& c) const;
  Polynomial divided_by(const Monomial& m) const;  // requires m to divide every term
  /// Exact quotient when `divisor` divides this polynomial, otherwise nullopt.
  std::optional<Polynomial> exact_quotient(const Polynomial& divisor) const;

  Rational evaluate(const Assignment& assignment) const;
  std::string format(const VarOrder& order = {}) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c);

  Terms terms_;
};

/// Result of big-O extraction. `exactly_zero` marks the zero Term, whose
/// dominant monomial is reported as O(1).
struct BigO {
  Monomial dominant;
  bool exactly_zero = false;

  std::string format(const VarOrder& order = {}) const;
  friend bool operator==(const BigO&, const BigO&) = default;
};

/// A rational function numerator/denominator in canonical form: reduced
/// coefficients, nonzero denominator with leading coefficient 1, common
/// monomial factors and exact polynomial quotients cancelled.
class Term {
 public:
  Term() = default;  // zero
  Term(const Rational& q);  // NOLINT(google-explicit-constructor)
  Term(long long c) : Term(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  explicit Term(Polynomial p);
  static Term ratio(Polynomial numerator, Polynomial denominator);
  static Term variable(std::string_view name);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  /// Value of a constant Term. Requires is_constant().
  Rational constant_value() const;

  /// Structural identity of canonical forms (stronger than ==).
  bool same_form(const Term& other) const { return num_ == other.num_ && den_ == other.den_; }

  Term& operator+=(const Term& b);
  Term& operator-=(const Term& b);
  Term& operator*=(const Term& b);
  Term& operator/=(const Term& b);
  Term operator-() const;

  friend Term operator+(Term a, const Term& b) { return a += b; }
  friend Term operator-(Term a, const Term& b) { return a -= b; }
  friend Term operator*(Term a, const Term& b) { return a *= b; }
  friend Term operator/(Term a, const Term& b) { return a /= b; }

  /// Rational-function equality: a/b == c/d iff a*d - c*b == 0.
  friend bool operator==(const Term& a, const Term& b);

 private:
  Polynomial num_;
  Polynomial den_{Rational(1)};
};

Term term_const(const Rational& q);
Term term_var(std::string_view name);

Rational evaluate(const Term& t, const Assignment& assignment);
BigO big_o(const Term& t);
std::string format(const Term& t, const VarOrder& order = {});

}  // namespace perfscope
