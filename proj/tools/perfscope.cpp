// perfscope: profile a PerfC program at a small input size and report its
// costs as formulas of the input-size parameters.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perfscope/analysis.hpp"
#include "perfscope/emit.hpp"
#include "perfscope/interp.hpp"
#include "perfscope/report.hpp"

namespace {

using namespace perfscope;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string source_path;
  std::vector<std::string> inputs;
  std::string dot_path;
  std::string report_path;
  std::int64_t max_iters = 2;
  bool quiet = false;
};

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// "name=small:large"
InputSpec parse_input(const std::string& text) {
  auto eq = text.find('=');
  auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos)
    throw UsageError("malformed --input '" + text + "': expected name=small:large");
  InputSpec in;
  in.name = text.substr(0, eq);
  if (!is_identifier(in.name)) throw UsageError("malformed --input '" + text + "': invalid name");
  if (!parse_int(std::string_view(text).substr(eq + 1, colon - eq - 1), in.small) ||
      !parse_int(std::string_view(text).substr(colon + 1), in.large))
    throw UsageError("malformed --input '" + text + "': sizes must be integers");
  if (in.small < 0 || in.large < in.small)
    throw UsageError("malformed --input '" + text + "': need large >= small >= 0");
  return in;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

int execute(const std::string& command, const Config& cfg) {
  std::vector<InputSpec> inputs;
  for (const auto& text : cfg.inputs) inputs.push_back(parse_input(text));
  if (cfg.max_iters < 1) throw UsageError("--max-iters must be at least 1");
  std::string source = read_file(cfg.source_path);

  AnalyzedProgram analyzed = analyze_source(std::move(source));
  if (command == "emit") {
    std::cout << emit_instrumented(analyzed.program, analyzed.trackedness, analyzed.loops);
    return kExitOk;
  }

  RunOptions opt;
  opt.mode = command == "exact" ? RunMode::Exact : RunMode::Profile;
  opt.max_iterations = cfg.max_iters;
  opt.inputs = inputs;
  ProfileResult result = run(analyzed, opt);

  std::string report = to_text(result);
  if (!cfg.report_path.empty()) write_file(cfg.report_path, report);
  if (!cfg.dot_path.empty()) write_file(cfg.dot_path, to_dot(result));
  if (!cfg.quiet) std::cout << report;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complexity profiler for PerfC programs"};
  app.require_subcommand(1);
  Config cfg;
  for (auto [name, help] : {std::pair{"run", "profile at the small size, extrapolating to symbolic counters"},
                            std::pair{"exact", "execute fully at the small size and print exact counters"},
                            std::pair{"emit", "print the instrumented source"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("source", cfg.source_path, "PerfC source file (.pc)")->required();
    sub->add_option("--input", cfg.inputs, "input size as name=small:large (repeatable)");
    sub->add_option("--dot", cfg.dot_path, "write the call tree as Graphviz DOT");
    sub->add_option("--report", cfg.report_path, "write the text report to a file");
    sub->add_option("--max-iters", cfg.max_iters, "loop iterations executed before extrapolating")
        ->capture_default_str();
    sub->add_flag("--quiet", cfg.quiet, "do not print the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return execute(command, cfg);
  } catch (const UsageError& e) {
    std::cerr << "perfscope: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DiagnosticError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << format_diagnostic(cfg.source_path, d) << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Configuration || e.kind() == ErrorKind::InvalidInputConfiguration) {
      std::cerr << "perfscope: " << e.what() << "\n";
      return kExitUsage;
    }
    std::cerr << format_diagnostic(cfg.source_path, Diagnostic{e.loc(), Severity::Error, e.what()}) << "\n";
    return kExitFailure;
  }
}
