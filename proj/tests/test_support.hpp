#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "perfscope/analysis.hpp"
#include "perfscope/interp.hpp"
#include "perfscope/term.hpp"

namespace perfscope::testing {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }
inline std::string golden_path(const std::string& name) { return std::string(GOLDEN_DIR) + "/" + name; }

inline std::string fixture(const std::string& name) { return read_text(fixture_path(name)); }
inline AnalyzedProgram analyze_fixture(const std::string& name) { return analyze_source(fixture(name)); }

inline ProfileResult profile(const AnalyzedProgram& a, std::vector<InputSpec> inputs, std::int64_t max_iterations = 2) {
  RunOptions opt;
  opt.inputs = std::move(inputs);
  opt.max_iterations = max_iterations;
  return run(a, opt);
}

inline ProfileResult exact(const AnalyzedProgram& a, std::vector<InputSpec> inputs) {
  RunOptions opt;
  opt.mode = RunMode::Exact;
  opt.inputs = std::move(inputs);
  return run(a, opt);
}

inline Term tv(const char* name) { return term_var(name); }

/// Sparse random terms over up to three variables, degree <= 4.
class TermGen {
 public:
  explicit TermGen(std::uint32_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Rational coefficient() {
    int num = uniform(-9, 9);
    if (num == 0) num = 1;
    return Rational(num, uniform(1, 4));
  }

  Monomial monomial(int max_degree) {
    static const char* names[] = {"n", "m", "k"};
    Monomial m;
    int degree = uniform(0, max_degree);
    for (int i = 0; i < degree; ++i) m = m * Monomial::variable(names[uniform(0, 2)]);
    return m;
  }

  Polynomial polynomial(int max_terms, int max_degree) {
    Polynomial p;
    int count = uniform(0, max_terms);
    for (int i = 0; i < count; ++i) p += Polynomial(monomial(max_degree), coefficient());
    return p;
  }

  Polynomial nonzero_polynomial(int max_terms, int max_degree) {
    Polynomial p = polynomial(max_terms, max_degree);
    return p.is_zero() ? Polynomial(coefficient()) : p;
  }

  Term term() {
    Polynomial num = polynomial(3, 4);
    if (uniform(0, 2) == 0) return Term::ratio(num, nonzero_polynomial(2, 2));
    return Term(num);
  }

  Assignment assignment() {
    Assignment a;
    for (const char* v : {"n", "m", "k"}) a[v] = Rational(uniform(-12, 12), uniform(1, 3));
    return a;
  }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace perfscope::testing

#ifdef DOCTEST_LIBRARY_INCLUDED
namespace doctest {
template <>
struct StringMaker<perfscope::SourceLoc> {
  static String convert(const perfscope::SourceLoc& loc) { return perfscope::to_string(loc).c_str(); }
};
template <>
struct StringMaker<std::vector<perfscope::SourceLoc>> {
  static String convert(const std::vector<perfscope::SourceLoc>& locs) {
    std::string out = "[";
    for (const auto& l : locs) out += " " + perfscope::to_string(l);
    return (out + " ]").c_str();
  }
};
}  // namespace doctest
#endif
