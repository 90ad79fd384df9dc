#include "perfscope/runtime.hpp"

#include <algorithm>

namespace perfscope {

std::string_view to_string(CommKind kind) {
  switch (kind) {
    case CommKind::Allreduce: return "allreduce";
    case CommKind::Send: return "send";
    case CommKind::Recv: return "recv";
  }
  return "comm";
}

Term CounterStore::get(const CounterKey& key) const {
  auto it = counters_.find(key);
  return it == counters_.end() ? Term{} : it->second;
}

void CounterStore::add(const CounterKey& key, const Term& amount) {
  if (amount.is_zero()) return;
  auto [it, inserted] = counters_.try_emplace(key, amount);
  if (!inserted) it->second += amount;
}

void CounterStore::set(const CounterKey& key, Term value) { counters_[key] = std::move(value); }

Term ProfileResult::total_comm_calls() const {
  Term sum;
  for (const auto& [_, t] : comm_calls) sum += t;
  return sum;
}

Term ProfileResult::total_comm_bytes() const {
  Term sum;
  for (const auto& [_, t] : comm_bytes) sum += t;
  return sum;
}

VarOrder ProfileResult::var_order() const {
  VarOrder order;
  for (const auto& in : inputs) order.names.push_back(in.name);
  return order;
}

Context::Context(std::vector<InputSpec> inputs, std::int64_t max_iterations)
    : inputs_(std::move(inputs)), max_iterations_(max_iterations) {
  if (max_iterations_ < 1) throw Error(ErrorKind::Configuration, "max iterations must be at least 1");
  for (const auto& in : inputs_) {
    if (!is_identifier(in.name)) throw Error(ErrorKind::Configuration, "invalid input name '" + in.name + "'");
    if (in.small < 0 || in.large < in.small)
      throw Error(ErrorKind::Configuration, "input '" + in.name + "' needs 0 <= small <= large");
    if (!small_cfg_.emplace(in.name, in.small).second)
      throw Error(ErrorKind::Configuration, "duplicate input '" + in.name + "'");
    large_cfg_.emplace(in.name, in.large);
  }
  nodes_.push_back(CallNode{0, std::string(kRootName), std::nullopt, {}});
}

Num Context::input(std::string_view name) const {
  for (const auto& in : inputs_)
    if (in.name == name) return num_input(in.name, in.small, in.large);
  throw Error(ErrorKind::Configuration, "no input named '" + std::string(name) + "'");
}

int Context::enter_function(std::string_view name) {
  CallNode& parent = nodes_[current_];
  auto it = parent.children.find(name);
  int child = 0;
  if (it != parent.children.end()) {
    child = it->second;
  } else {
    child = static_cast<int>(nodes_.size());
    parent.children.emplace(std::string(name), child);
    nodes_.push_back(CallNode{child, std::string(name), current_, {}});
  }
  current_ = child;
  counters_.add(CounterKey::node_calls(child), Term(1));
  return child;
}

void Context::exit_function() {
  const auto& parent = nodes_[current_].parent;
  if (!parent) throw Error(ErrorKind::InternalInvariant, "exit_function at the root node");
  current_ = *parent;
}

void Context::charge(const CounterKey& key, const Term& amount) {
  counters_.add(key, amount);
  switch (key.kind) {
    case CounterKind::Flops: counters_.add(CounterKey::node_flops(current_), amount); break;
    case CounterKind::CommCalls: counters_.add(CounterKey::node_comm_calls(current_), amount); break;
    case CounterKind::CommBytes: counters_.add(CounterKey::node_comm_bytes(current_), amount); break;
    case CounterKind::AllocBytesTotal: counters_.add(CounterKey::node_alloc_bytes(current_), amount); break;
    default: break;
  }
}

std::size_t Context::loop_enter(const Num& trip, SourceLoc loc) {
  if (trip.small < 0)
    throw Error(ErrorKind::NegativeTrip, "loop trip count is negative (" + std::to_string(trip.small) + ")", loc);
  loops_.push_back(LoopScope{trip, 0, counters_, mem_.live_large, loc});
  return loops_.size() - 1;
}

void Context::check_top(std::size_t scope) const {
  if (loops_.empty() || scope != loops_.size() - 1)
    throw Error(ErrorKind::InternalInvariant, "loop scope is not on top of the loop stack");
}

bool Context::loop_iteration(std::size_t scope) {
  check_top(scope);
  LoopScope& s = loops_[scope];
  if (s.executed < std::min(max_iterations_, s.trip.small)) {
    ++s.executed;
    return true;
  }
  return false;
}

void Context::loop_exit(std::size_t scope) {
  check_top(scope);
  LoopScope s = std::move(loops_.back());
  loops_.pop_back();

  if (s.executed == 0) {
    counters_ = std::move(s.snapshot);
    mem_.live_large = s.live_large_snapshot;
    warn({WarningKind::ZeroIterations, s.loc, "loop ran zero iterations; it contributes nothing to the formulas"});
    return;
  }

  // counter := snapshot + (current - snapshot) * trip / executed
  const Term factor = s.trip.term / Term(s.executed);
  CounterStore scaled = s.snapshot;
  for (const auto& [key, now] : counters_.entries()) {
    Term delta = now - s.snapshot.get(key);
    if (delta.is_zero()) continue;
    scaled.set(key, s.snapshot.get(key) + delta * factor);
  }
  counters_ = std::move(scaled);

  std::int64_t delta_large = checked_int_op(IntOp::Sub, mem_.live_large, s.live_large_snapshot, s.loc);
  std::int64_t grown = checked_int_op(IntOp::Mul, delta_large, s.trip.large, s.loc) / s.executed;
  mem_.live_large = checked_int_op(IntOp::Add, s.live_large_snapshot, grown, s.loc);
  update_peak();
}

void Context::update_peak() {
  if (mem_.live_large > mem_.peak_large) {
    mem_.peak_large = mem_.live_large;
    mem_.peak_term = counters_.get(CounterKey::live_bytes());
  }
}

int Context::mem_alloc(const Num& size, SourceLoc loc) {
  if (size.small < 0 || size.large < 0) throw Error(ErrorKind::Allocation, "negative allocation size", loc);
  int id = next_block_++;
  mem_.blocks.emplace(id, Allocation{size, true});
  charge(CounterKey::live_bytes(), size.term);
  charge(CounterKey::alloc_bytes_total(), size.term);
  mem_.live_large = checked_int_op(IntOp::Add, mem_.live_large, size.large, loc);
  update_peak();
  return id;
}

void Context::mem_free(int block, SourceLoc loc) {
  auto it = mem_.blocks.find(block);
  if (it == mem_.blocks.end()) throw Error(ErrorKind::MemoryMisuse, "free of unknown block", loc);
  if (!it->second.live) throw Error(ErrorKind::MemoryMisuse, "double free", loc);
  it->second.live = false;
  charge(CounterKey::live_bytes(), -it->second.size.term);
  mem_.live_large = checked_int_op(IntOp::Sub, mem_.live_large, it->second.size.large, loc);
}

bool Context::block_live(int block) const {
  auto it = mem_.blocks.find(block);
  return it != mem_.blocks.end() && it->second.live;
}

void Context::comm_event(CommKind kind, const Num& bytes, SourceLoc loc) {
  if (bytes.small < 0) throw Error(ErrorKind::Arithmetic, "negative communication size", loc);
  charge(CounterKey::comm_calls(kind), Term(1));
  charge(CounterKey::comm_bytes(kind), bytes.term);
}

void Context::warn(Warning w) {
  // One entry per evaluation site; location-less warnings dedupe on text.
  std::string key = w.loc.valid() ? std::string() : w.message;
  if (seen_warnings_.emplace(w.kind, w.loc, std::move(key)).second) warnings_.push_back(std::move(w));
}

WarningSink Context::warning_sink() {
  return [this](Warning w) { warn(std::move(w)); };
}

ProfileResult Context::finalize() const {
  if (!loops_.empty()) throw Error(ErrorKind::InternalInvariant, "finalize with open loop scopes");
  if (current_ != 0) throw Error(ErrorKind::InternalInvariant, "finalize with unbalanced function scopes");

  ProfileResult r;
  r.max_iterations = max_iterations_;
  r.inputs = inputs_;
  r.flops = counters_.get(CounterKey::flops());
  r.alloc_bytes_total = counters_.get(CounterKey::alloc_bytes_total());
  r.live_bytes = counters_.get(CounterKey::live_bytes());
  for (CommKind k : kAllCommKinds) {
    r.comm_calls[k] = counters_.get(CounterKey::comm_calls(k));
    r.comm_bytes[k] = counters_.get(CounterKey::comm_bytes(k));
  }
  r.peak_term = mem_.peak_term;
  r.peak_large = mem_.peak_large;
  r.warnings = warnings_;

  for (const auto& node : nodes_) {
    NodeProfile p;
    p.id = node.id;
    p.name = node.name;
    p.parent = node.parent;
    for (const auto& [_, child] : node.children) p.children.push_back(child);
    std::sort(p.children.begin(), p.children.end());
    p.calls = counters_.get(CounterKey::node_calls(node.id));
    p.flops = counters_.get(CounterKey::node_flops(node.id));
    p.comm_calls = counters_.get(CounterKey::node_comm_calls(node.id));
    p.comm_bytes = counters_.get(CounterKey::node_comm_bytes(node.id));
    p.alloc_bytes = counters_.get(CounterKey::node_alloc_bytes(node.id));
    r.nodes.push_back(std::move(p));
  }

  for (const auto& p : r.nodes) {
    if (p.id == 0) continue;
    auto it = std::find_if(r.functions.begin(), r.functions.end(), [&](const auto& f) { return f.name == p.name; });
    if (it == r.functions.end()) {
      r.functions.push_back(FunctionSummary{p.name, {}, {}, {}, {}, {}, {}});
      it = std::prev(r.functions.end());
    }
    it->calls += p.calls;
    it->flops += p.flops;
    it->alloc_bytes += p.alloc_bytes;
    it->comm_calls += p.comm_calls;
    it->comm_bytes += p.comm_bytes;
  }
  for (auto& f : r.functions) f.flops_big_o = big_o(f.flops);
  return r;
}

}  // namespace perfscope
