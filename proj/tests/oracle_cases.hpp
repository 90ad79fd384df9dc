#pragma once

// Fixture programs whose profiled formulas are checked against exact-mode
// execution at several input assignments.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace perfscope::testing {

struct OracleCase {
  std::string fixture;
  std::vector<InputSpec> profile_inputs;            // small:large for the profiled run
  std::vector<std::map<std::string, std::int64_t>> extra;  // further assignments to check
};

inline const std::vector<OracleCase>& oracle_cases() {
  static const std::vector<OracleCase> cases = {
      {"straight.pc", {{"n", 4, 256}, {"m", 3, 128}}, {{{"n", 7}, {"m", 5}}, {{"n", 20}, {"m", 11}}}},
      {"single_loop.pc", {{"n", 4, 256}}, {{{"n", 9}}, {{"n", 33}}}},
      {"two_loops.pc", {{"n", 4, 256}, {"m", 3, 128}}, {{{"n", 6}, {"m", 10}}, {{"n", 17}, {"m", 2}}}},
      {"nest2.pc", {{"n", 4, 256}, {"m", 3, 128}}, {{{"n", 5}, {"m", 7}}, {{"n", 12}, {"m", 9}}}},
      {"nest3.pc", {{"n", 3, 64}, {"m", 2, 32}, {"k", 4, 16}}, {{{"n", 5}, {"m", 3}, {"k", 2}}, {{"n", 7}, {"m", 6}, {"k", 5}}}},
      {"alloc_loop.pc", {{"n", 4, 256}, {"m", 3, 128}}, {{{"n", 8}, {"m", 5}}, {{"n", 13}, {"m", 21}}}},
      {"comm_loop.pc", {{"n", 4, 256}, {"m", 3, 128}}, {{{"n", 10}, {"m", 4}}, {{"n", 3}, {"m", 16}}}},
      {"call_loop.pc", {{"n", 4, 256}, {"m", 3, 128}}, {{{"n", 6}, {"m", 6}}, {{"n", 11}, {"m", 2}}}},
      {"stride.pc", {{"n", 8, 256}}, {{{"n", 24}}, {{"n", 64}}}},
      {"while_pragma.pc", {{"n", 4, 256}}, {{{"n", 10}}, {{"n", 25}}}},
  };
  return cases;
}

struct Quantity {
  const char* name;
  Term ProfileResult::*direct;
  Term (ProfileResult::*computed)() const;

  Term of(const ProfileResult& r) const { return direct ? r.*direct : (r.*computed)(); }
};

inline const std::vector<Quantity>& oracle_quantities() {
  static const std::vector<Quantity> q = {
      {"flops", &ProfileResult::flops, nullptr},
      {"comm calls", nullptr, &ProfileResult::total_comm_calls},
      {"comm bytes", nullptr, &ProfileResult::total_comm_bytes},
      {"allocated bytes", &ProfileResult::alloc_bytes_total, nullptr},
  };
  return q;
}

/// Mismatch descriptions; empty when every quantity agrees at every point.
/// `points` receives the number of (assignment, quantity) comparisons made.
inline std::vector<std::string> check_oracle(const OracleCase& c, int& points) {
  std::vector<std::string> mismatches;
  AnalyzedProgram a = analyze_fixture(c.fixture);
  ProfileResult profiled = profile(a, c.profile_inputs);

  std::vector<std::map<std::string, std::int64_t>> assignments;
  std::map<std::string, std::int64_t> small;
  for (const auto& in : c.profile_inputs) small[in.name] = in.small;
  assignments.push_back(small);
  for (const auto& e : c.extra) assignments.push_back(e);

  for (const auto& sigma : assignments) {
    std::vector<InputSpec> inputs;
    Assignment at;
    for (const auto& [name, v] : sigma) {
      inputs.push_back({name, v, v});
      at[name] = v;
    }
    ProfileResult measured = exact(a, inputs);
    for (const auto& q : oracle_quantities()) {
      ++points;
      Rational predicted = evaluate(q.of(profiled), at);
      Rational actual = constant_count(q.of(measured));
      if (predicted != actual) {
        std::ostringstream msg;
        msg << c.fixture << " " << q.name << " at";
        for (const auto& [name, v] : sigma) msg << " " << name << "=" << v;
        msg << ": formula " << format(q.of(profiled)) << " gives " << to_string(predicted) << ", exact run counts "
            << to_string(actual);
        mismatches.push_back(msg.str());
      }
    }
  }
  return mismatches;
}

}  // namespace perfscope::testing

namespace perfscope::testing {

struct DotGoldenCase {
  std::string fixture;
  std::vector<InputSpec> inputs;
  std::string golden;
};

inline const std::vector<DotGoldenCase>& dot_golden_cases() {
  static const std::vector<DotGoldenCase> cases = {
      {"execute.pc", {{"n", 8, 256}}, "execute.dot"},
      {"nest2.pc", {{"n", 4, 256}, {"m", 3, 128}}, "nest2.dot"},
      {"nest3.pc", {{"n", 3, 64}, {"m", 2, 32}, {"k", 4, 16}}, "nest3.dot"},
      {"call_loop.pc", {{"n", 4, 256}, {"m", 3, 128}}, "call_loop.dot"},
      {"comm_loop.pc", {{"n", 4, 256}, {"m", 3, 128}}, "comm_loop.dot"},
      {"two_alloc.pc", {{"n", 16, 256}, {"m", 8, 128}}, "two_alloc.dot"},
  };
  return cases;
}

inline std::string cli_input_args(const std::vector<InputSpec>& inputs) {
  std::string out;
  for (const auto& in : inputs)
    out += " --input " + in.name + "=" + std::to_string(in.small) + ":" + std::to_string(in.large);
  return out;
}

}  // namespace perfscope::testing
