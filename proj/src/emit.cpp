#include "perfscope/emit.hpp"

#include <algorithm>
#include <functional>

namespace perfscope {

namespace {

struct Edit {
  std::size_t begin;
  std::size_t end;
  std::string text;
  int order;  // insertion order among edits at the same offset
};

std::string element_name(TypeKind ptr) { return ptr == TypeKind::IntPtr ? "int" : "Double"; }

std::string tracked_type(TypeKind declared, Marker m) {
  switch (m) {
    case Marker::TrackedInt: return "Num";
    case Marker::TrackedFloat: return "Double";
    case Marker::TrackedBlock: return "DynamicMem<" + element_name(declared) + ">";
    case Marker::Plain: break;
  }
  return std::string(to_string(declared));
}

class Emitter {
 public:
  Emitter(const Program& prog, const TrackednessMap& map, const LoopAnalysis& loops)
      : prog_(prog), map_(map), loops_(loops) {}

  std::string run() {
    for (std::size_t f = 0; f < prog_.functions.size(); ++f) function(f);
    std::stable_sort(edits_.begin(), edits_.end(), [](const Edit& a, const Edit& b) {
      return a.begin != b.begin ? a.begin < b.begin : a.order < b.order;
    });
    std::string out;
    std::size_t pos = 0;
    for (const Edit& e : edits_) {
      if (e.begin < pos) continue;  // overlapping edit; first one wins
      out.append(prog_.source, pos, e.begin - pos);
      out += e.text;
      pos = e.end;
    }
    out.append(prog_.source, pos, std::string::npos);
    return out;
  }

 private:
  void replace(std::size_t begin, std::size_t end, std::string text) {
    edits_.push_back({begin, end, std::move(text), next_order_++});
  }
  void insert(std::size_t at, std::string text) { replace(at, at, std::move(text)); }

  void retype(const TypeSpec& type, std::size_t name_begin, Marker m) {
    if (m == Marker::Plain) return;
    replace(type.begin, name_begin, tracked_type(type.kind, m) + " ");
  }

  void function(std::size_t index) {
    const Function& fn = prog_.functions[index];
    Marker ret = Marker::Plain;
    if (fn.return_type.kind == TypeKind::Double) ret = Marker::TrackedFloat;
    if (is_pointer(fn.return_type.kind)) ret = Marker::TrackedBlock;
    if (fn.return_type.kind == TypeKind::Int && map_.tracked_returns[index]) ret = Marker::TrackedInt;
    retype(fn.return_type, fn.name_begin, ret);
    for (const Param& p : fn.params) retype(p.type, p.name_begin, map_.marker(p.decl));

    insert(fn.body_open + 1, "ENTERFUNCTION");
    stmt(*fn.body);
    insert(fn.body_close, "EXITFUNCTION");
  }

  void stmt(const Stmt& s) {
    if (s.kind == StmtKind::Decl) retype(s.type, s.name_begin, map_.marker(s.decl));
    if (s.kind == StmtKind::For || s.kind == StmtKind::While) {
      const LoopAnnotation& a = loops_.at(s.loop_id);
      if (a.mode == LoopMode::Trip) {
        insert(s.begin, "LOOP(" + render_expr(prog_, *a.trip) + ") ");
        insert(s.header_end, " ITERATION");
      }
    }
    for (const Expr* e : {s.init.get(), s.target.get(), s.value.get(), s.cond.get()})
      if (e) expr(*e);
    for (const Stmt* child : {s.for_init.get(), s.for_step.get(), s.then_branch.get(), s.else_branch.get(), s.body.get()})
      if (child) stmt(*child);
    for (const auto& inner : s.stmts) stmt(*inner);
  }

  void expr(const Expr& e) {
    if (e.synthetic) return;
    if (e.kind == ExprKind::Call && e.builtin == Builtin::Malloc)
      replace(e.begin, e.begin + e.name.size(), "perf_malloc<" + element_name(e.type) + ">");
    for (const auto& op : e.operands) expr(*op);
  }

  const Program& prog_;
  const TrackednessMap& map_;
  const LoopAnalysis& loops_;
  std::vector<Edit> edits_;
  int next_order_ = 0;
};

}  // namespace

std::string emit_instrumented(const Program& prog, const TrackednessMap& map, const LoopAnalysis& loops) {
  return Emitter(prog, map, loops).run();
}

}  // namespace perfscope
