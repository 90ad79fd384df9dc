#include "perfscope/report.hpp"

#include <algorithm>
#include <sstream>

namespace perfscope {

namespace {

std::string escape_label(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string node_label(const NodeProfile& node, const VarOrder& order) {
  std::string label = node.name;
  label += "\ncalls: " + format(node.calls, order);
  label += "\nflops: " + format(node.flops, order) + " = " + big_o(node.flops).format(order);
  label += "\nalloc: " + format(node.alloc_bytes, order) + " B";
  label += "\ncomm: " + format(node.comm_calls, order) + " calls, " + format(node.comm_bytes, order) + " B";
  return label;
}

std::string root_label(const ProfileResult& r, const VarOrder& order) {
  return std::string(kRootName) + "\npeak: " + format(r.peak_term, order) + " B (large: " +
         std::to_string(r.peak_large) + ")";
}

std::string format_num(const Num& n, const VarOrder& order) {
  return "small " + std::to_string(n.small) + ", term " + format(n.term, order) + ", large " +
         std::to_string(n.large);
}

}  // namespace

std::string format_comm(const Term& calls, const Term& bytes, const VarOrder& order) {
  bool one = calls.is_constant() && calls.constant_value() == 1;
  return format(calls, order) + (one ? " call, " : " calls, ") + format(bytes, order) + " B";
}

std::string to_dot(const ProfileResult& r) {
  const VarOrder order = r.var_order();
  std::ostringstream out;
  out << "digraph calltree {\n";
  if (r.nodes.empty()) {
    out << "  n0 [label=\"" << escape_label(root_label(r, order)) << "\"];\n";
  } else {
    std::vector<const NodeProfile*> nodes;
    for (const auto& n : r.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const NodeProfile* n : nodes) {
      std::string label = n->id == 0 ? root_label(r, order) : node_label(*n, order);
      out << "  n" << n->id << " [label=\"" << escape_label(label) << "\"];\n";
    }
    for (const NodeProfile* n : nodes)
      for (int child : n->children) out << "  n" << n->id << " -> n" << child << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_text(const ProfileResult& r) {
  const VarOrder order = r.var_order();
  std::ostringstream out;
  out << "perfscope report\n";
  out << "mode: " << r.mode;
  if (r.mode == "profile") {
    if (r.max_iterations == kUnlimitedIterations)
      out << " (loop bodies run fully)";
    else
      out << " (loop bodies run at most " << r.max_iterations << " times)";
  }
  out << "\n";
  out << "inputs:";
  if (r.inputs.empty()) out << " none";
  for (const auto& in : r.inputs) out << " " << in.name << "=" << in.small << ":" << in.large;
  out << "\n";
  if (r.main_result) out << "main returned: " << format_num(*r.main_result, order) << "\n";
  out << "flops: " << format(r.flops, order) << " = " << big_o(r.flops).format(order) << "\n";
  out << "peak memory: " << format(r.peak_term, order) << " B (large: " << r.peak_large << ")\n";
  out << "allocated: " << format(r.alloc_bytes_total, order) << " B\n";
  out << "communication: " << format_comm(r.total_comm_calls(), r.total_comm_bytes(), order) << "\n";
  for (CommKind k : kAllCommKinds) {
    auto calls = r.comm_calls.find(k);
    if (calls == r.comm_calls.end() || calls->second.is_zero()) continue;
    out << "  " << to_string(k) << ": " << format_comm(calls->second, r.comm_bytes.at(k), order) << "\n";
  }
  out << "\n";

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"function", "calls", "flops", "big-O", "alloc", "comm"});
  for (const auto& f : r.functions)
    rows.push_back({f.name, format(f.calls, order), format(f.flops, order), f.flops_big_o.format(order),
                    format(f.alloc_bytes, order) + " B", format_comm(f.comm_calls, f.comm_bytes, order)});
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  auto emit_row = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += " | ";
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
    }
    out << line << "\n";
  };
  emit_row(rows[0]);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule.append(width[c], '-');
  }
  out << rule << "\n";
  for (std::size_t i = 1; i < rows.size(); ++i) emit_row(rows[i]);

  out << "\nwarnings:";
  if (r.warnings.empty()) out << " none";
  out << "\n";
  for (const auto& w : r.warnings) {
    out << "  ";
    if (w.loc.valid()) out << w.loc.line << ":" << w.loc.column << ": ";
    out << to_string(w.kind) << ": " << w.message << "\n";
  }
  return out.str();
}

}  // namespace perfscope
