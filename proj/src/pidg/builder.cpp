#include "bsim/pidg/builder.hpp"

#include <string>

namespace bsim::pidg {

using executor::DatumId;
using executor::DatumInfo;
using executor::DatumKind;
using executor::EventKind;
using executor::ExecutionTrace;
using executor::Mode;
using executor::TraceEvent;

namespace {

class Builder {
 public:
  explicit Builder(const ExecutionTrace& t) : t_(t), memo_(t.data.size(), -1) {}

  Pidg run() {
    Node entry;
    entry.type = NodeType::EntryPoint;
    entry.signature = t_.entry;
    int ep = g_.add_node(entry);
    for (DatumId p : t_.params) g_.add_edge(ref(p), ep, EdgeType::Parameter);
    for (std::size_t i = 0; i < t_.events.size(); ++i) {
      event_ = i;
      apply(t_.events[i]);
    }
    return std::move(g_);
  }

 private:
  const DatumInfo& info(DatumId id) const {
    const DatumInfo* d = t_.find(id);
    if (!d) throw MalformedTrace("event " + std::to_string(event_) + " references unknown datum " + std::to_string(id));
    return *d;
  }

  Node data_node(const DatumInfo& d) const {
    Node n;
    switch (d.kind) {
      case DatumKind::Value: n.type = NodeType::Value; break;
      case DatumKind::Array: n.type = NodeType::Array; break;
      default: n.type = NodeType::Object; break;
    }
    n.runtimeType = d.type.empty() ? "?" : d.type;
    if (n.type == NodeType::Value && d.mode == Mode::Concrete) n.literal = d.literal;
    if (d.hasText) {
      n.string = d.text;
      n.hasString = true;
    }
    n.flags = d.mode == Mode::Concrete ? kConcrete : kSymbolic;
    if (d.flags & executor::kStatic) n.flags |= kStatic;
    if (d.flags & executor::kSynthetic) n.flags |= kSynthetic;
    if (d.flags & executor::kEntryParam) n.flags |= kEntryPointParameter;
    n.sourceDefined = d.sourceDefined;
    n.datum = d.id;
    return n;
  }

  // One node per datum. Every evaluation of a literal is a new datum, so
  // concrete values still get a node per textual reference.
  int ref(DatumId id) {
    const DatumInfo& d = info(id);
    if (memo_[id] < 0) memo_[id] = g_.add_node(data_node(d));
    return memo_[id];
  }

  int op_node(std::string op, DatumId result) {
    Node n;
    n.type = NodeType::Operator;
    n.op = std::move(op);
    const DatumInfo& r = info(result);
    n.runtimeType = r.type.empty() ? "?" : r.type;
    return g_.add_node(n);
  }

  void transform(const std::string& op, const TraceEvent& e) {
    int o = op_node(op, e.result);
    for (DatumId x : e.operands) g_.add_edge(ref(x), o, EdgeType::Transformation);
    g_.add_edge(o, ref(e.result), EdgeType::Transformation);
  }

  static std::string index_label(const DatumInfo& idx) {
    if (idx.kind == DatumKind::Value && idx.mode == Mode::Concrete) return "[" + idx.literal + "]";
    return "[?]";
  }

  void apply(const TraceEvent& e) {
    switch (e.kind) {
      case EventKind::ApiCall: {
        Node n;
        n.type = NodeType::MethodCall;
        n.signature = e.signature;
        int mc = g_.add_node(n);
        if (e.scope != executor::kNoDatum) g_.add_edge(ref(e.scope), mc, EdgeType::Scope);
        for (DatumId p : e.operands) g_.add_edge(ref(p), mc, EdgeType::Parameter);
        if (e.result != executor::kNoDatum) g_.add_edge(mc, ref(e.result), EdgeType::Supplied);
        break;
      }
      case EventKind::FieldAccess: {
        if (e.scope != executor::kNoDatum) {
          g_.add_edge(ref(e.scope), ref(e.datum), EdgeType::Aggregation, e.name);
          break;
        }
        int n = ref(e.datum);
        if (e.write) g_.node(n).flags |= kStatic;
        break;
      }
      case EventKind::ArrayAccess:
        g_.add_edge(ref(e.scope), ref(e.datum), EdgeType::Aggregation, index_label(info(e.index)));
        break;
      case EventKind::PrimaryOperation:
        transform(e.name, e);
        break;
      case EventKind::StringConcat:
        transform("Concatenation", e);
        break;
      case EventKind::Stringify:
        if (e.operands.size() != 1) throw MalformedTrace("Stringify event needs exactly one operand");
        g_.add_edge(ref(e.operands[0]), ref(e.result), EdgeType::Transformation);
        break;
      case EventKind::Assertion:
        for (DatumId x : e.operands) info(x);
        break;
    }
  }

  const ExecutionTrace& t_;
  Pidg g_;
  std::vector<int> memo_;
  std::size_t event_ = 0;
};

}  // namespace

Pidg build_pidg(const ExecutionTrace& trace) { return Builder(trace).run(); }

std::vector<Pidg> build_pidg_set(const std::vector<ExecutionTrace>& traces) {
  std::vector<Pidg> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(build_pidg(t));
  return out;
}

}  // namespace bsim::pidg
