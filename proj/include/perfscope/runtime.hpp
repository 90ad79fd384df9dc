#pragma once

// Profiling state for one run: symbolic counters, the at-most-N loop
// extrapolation protocol, heap and communication tracking, and the
// calling-context tree.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "perfscope/diagnostics.hpp"
#include "perfscope/term.hpp"
#include "perfscope/values.hpp"

namespace perfscope {

enum class CommKind { Allreduce, Send, Recv };

inline constexpr CommKind kAllCommKinds[] = {CommKind::Allreduce, CommKind::Send, CommKind::Recv};

std::string_view to_string(CommKind kind);

enum class CounterKind {
  Flops,
  CommCalls,
  CommBytes,
  AllocBytesTotal,
  LiveBytes,
  NodeCalls,
  NodeFlops,
  NodeCommCalls,
  NodeCommBytes,
  NodeAllocBytes,
};

/// Counter identity. `index` is the CommKind for comm counters and the node
/// id for per-node counters, 0 otherwise.
struct CounterKey {
  CounterKind kind = CounterKind::Flops;
  int index = 0;

  static CounterKey flops() { return {CounterKind::Flops, 0}; }
  static CounterKey comm_calls(CommKind k) { return {CounterKind::CommCalls, static_cast<int>(k)}; }
  static CounterKey comm_bytes(CommKind k) { return {CounterKind::CommBytes, static_cast<int>(k)}; }
  static CounterKey alloc_bytes_total() { return {CounterKind::AllocBytesTotal, 0}; }
  static CounterKey live_bytes() { return {CounterKind::LiveBytes, 0}; }
  static CounterKey node_calls(int node) { return {CounterKind::NodeCalls, node}; }
  static CounterKey node_flops(int node) { return {CounterKind::NodeFlops, node}; }
  static CounterKey node_comm_calls(int node) { return {CounterKind::NodeCommCalls, node}; }
  static CounterKey node_comm_bytes(int node) { return {CounterKind::NodeCommBytes, node}; }
  static CounterKey node_alloc_bytes(int node) { return {CounterKind::NodeAllocBytes, node}; }

  friend auto operator<=>(const CounterKey&, const CounterKey&) = default;
};

class CounterStore {
 public:
  using Map = std::map<CounterKey, Term>;

  /// Term 0 for absent keys.
  Term get(const CounterKey& key) const;
  void add(const CounterKey& key, const Term& amount);
  void set(const CounterKey& key, Term value);
  const Map& entries() const { return counters_; }

 private:
  Map counters_;
};

struct InputSpec {
  std::string name;
  std::int64_t small = 0;
  std::int64_t large = 0;

  friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

struct CallNode {
  int id = 0;
  std::string name;
  std::optional<int> parent;
  std::map<std::string, int, std::less<>> children;
};

struct LoopScope {
  Num trip;
  std::int64_t executed = 0;
  CounterStore snapshot;
  std::int64_t live_large_snapshot = 0;
  SourceLoc loc;
};

struct Allocation {
  Num size;
  bool live = true;
};

struct MemState {
  std::map<int, Allocation> blocks;
  std::int64_t live_large = 0;
  Term peak_term;
  std::int64_t peak_large = 0;
};

/// Aggregated statistics of one calling-context node.
struct NodeProfile {
  int id = 0;
  std::string name;
  std::optional<int> parent;
  std::vector<int> children;  // ascending id
  Term calls;
  Term flops;
  Term comm_calls;
  Term comm_bytes;
  Term alloc_bytes;
};

/// Per-function totals, summed over every calling context of the function.
struct FunctionSummary {
  std::string name;
  Term calls;
  Term flops;
  BigO flops_big_o;
  Term alloc_bytes;
  Term comm_calls;
  Term comm_bytes;
};

struct ProfileResult {
  std::string mode = "profile";
  std::int64_t max_iterations = 2;
  std::vector<InputSpec> inputs;

  std::vector<NodeProfile> nodes;  // nodes[0] is the synthetic root
  std::vector<FunctionSummary> functions;

  Term flops;
  Term alloc_bytes_total;
  Term live_bytes;
  std::map<CommKind, Term> comm_calls;
  std::map<CommKind, Term> comm_bytes;
  Term peak_term;
  std::int64_t peak_large = 0;

  std::vector<Warning> warnings;
  std::optional<Num> main_result;

  Term total_comm_calls() const;
  Term total_comm_bytes() const;
  /// Variable ranking for rendering: input declaration order.
  VarOrder var_order() const;
};

inline constexpr std::int64_t kUnlimitedIterations = std::numeric_limits<std::int64_t>::max();
inline constexpr std::string_view kRootName = "<program>";

/// One profiling run. Confined to a single thread; independent contexts share
/// nothing.
class Context {
 public:
  explicit Context(std::vector<InputSpec> inputs, std::int64_t max_iterations = 2);

  const std::vector<InputSpec>& inputs() const { return inputs_; }
  std::int64_t max_iterations() const { return max_iterations_; }
  const Assignment& small_assignment() const { return small_cfg_; }
  const Assignment& large_assignment() const { return large_cfg_; }
  /// Tracked value of a named input.
  Num input(std::string_view name) const;

  int enter_function(std::string_view name);
  void exit_function();
  int current_node() const { return current_; }
  const std::vector<CallNode>& nodes() const { return nodes_; }

  /// Adds to a counter. Global FLOP, comm and allocation charges are mirrored
  /// into the current node's counters.
  void charge(const CounterKey& key, const Term& amount);
  const CounterStore& counters() const { return counters_; }

  /// Opens a loop scope; returns its depth index.
  std::size_t loop_enter(const Num& trip, SourceLoc loc = {});
  bool loop_iteration(std::size_t scope);
  void loop_exit(std::size_t scope);
  std::size_t loop_depth() const { return loops_.size(); }
  const LoopScope& loop(std::size_t scope) const { return loops_.at(scope); }

  int mem_alloc(const Num& size, SourceLoc loc = {});
  void mem_free(int block, SourceLoc loc = {});
  const MemState& memory() const { return mem_; }
  bool block_live(int block) const;

  void comm_event(CommKind kind, const Num& bytes, SourceLoc loc = {});

  /// Records a warning once per (kind, location).
  void warn(Warning w);
  WarningSink warning_sink();
  const std::vector<Warning>& warnings() const { return warnings_; }

  ProfileResult finalize() const;

 private:
  void check_top(std::size_t scope) const;
  void update_peak();

  std::vector<InputSpec> inputs_;
  std::int64_t max_iterations_;
  Assignment small_cfg_;
  Assignment large_cfg_;

  CounterStore counters_;
  std::vector<CallNode> nodes_;
  int current_ = 0;
  std::vector<LoopScope> loops_;
  MemState mem_;
  int next_block_ = 1;

  std::vector<Warning> warnings_;
  std::set<std::tuple<WarningKind, SourceLoc, std::string>> seen_warnings_;
};

}  // namespace perfscope
