#include "bsim/executor/executor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "bsim/frontend/lexer.hpp"

namespace bsim::executor {

using frontend::BinaryOp;
using frontend::Literal;
using frontend::LiteralKind;
using frontend::UnaryOp;

std::pair<ExecutionContext, ExecutionContext> fork_context(const ExecutionContext& ctx, DatumId cond) {
  std::pair<ExecutionContext, ExecutionContext> out{ctx, ctx};
  TraceEvent t;
  t.kind = EventKind::Assertion;
  t.operands = {cond};
  t.truth = true;
  out.first.events.push_back(t);
  t.truth = false;
  out.second.events.push_back(t);
  return out;
}

namespace {

// Pre-parsed literal.
struct LitVal {
  DatumKind kind = DatumKind::Value;
  std::string type;
  Scalar scalar;
  std::string text;
};

std::string strip_underscores(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  return s;
}

LitVal parse_literal(const Literal& l) {
  LitVal v;
  std::string sp = strip_underscores(l.spelling);
  bool neg = !sp.empty() && sp[0] == '-';
  if (neg) sp.erase(0, 1);
  switch (l.kind) {
    case LiteralKind::Int:
    case LiteralKind::Long: {
      v.type = l.kind == LiteralKind::Int ? "int" : "long";
      if (!sp.empty() && (sp.back() == 'L' || sp.back() == 'l')) sp.pop_back();
      std::uint64_t u = std::strtoull(sp.c_str(), nullptr, 0);
      if (sp.size() > 1 && sp[0] == '0' && sp[1] != 'x' && sp[1] != 'X') u = std::strtoull(sp.c_str(), nullptr, 8);
      auto i = static_cast<std::int64_t>(u);
      v.scalar.i = wrap_integral(neg ? -i : i, v.type);
      break;
    }
    case LiteralKind::Float:
    case LiteralKind::Double: {
      v.type = l.kind == LiteralKind::Float ? "float" : "double";
      if (!sp.empty() && std::string("fFdD").find(sp.back()) != std::string::npos) sp.pop_back();
      double d = std::strtod(sp.c_str(), nullptr);
      if (l.kind == LiteralKind::Float) d = static_cast<float>(d);
      v.scalar.d = neg ? -d : d;
      v.scalar.isFloat = true;
      break;
    }
    case LiteralKind::Char:
      v.type = "char";
      v.scalar.i = static_cast<std::int64_t>(frontend::decode_char_literal(l.spelling));
      break;
    case LiteralKind::Boolean:
      v.type = "boolean";
      v.scalar.i = l.spelling == "true";
      break;
    case LiteralKind::String:
      v.kind = DatumKind::Object;
      v.type = "String";
      v.text = frontend::decode_string_literal(l.spelling);
      break;
    case LiteralKind::Null:
      v.kind = DatumKind::Object;
      v.type = "null";
      break;
  }
  return v;
}

const char* op_text(BinaryOp op) { return frontend::to_string(op); }

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::And:
    case BinaryOp::Or:
      return true;
    default:
      return false;
  }
}

bool is_primitive(const std::string& t) { return frontend::is_primitive_name(t); }

double as_double(const Datum& d) { return d.scalar.isFloat ? d.scalar.d : static_cast<double>(d.scalar.i); }

// Converts a concrete scalar of type `from` to type `to`.
Scalar convert(const Scalar& s, const std::string& to) {
  Scalar r;
  if (is_floating(to)) {
    r.isFloat = true;
    r.d = s.isFloat ? s.d : static_cast<double>(s.i);
    if (to == "float") r.d = static_cast<float>(r.d);
  } else if (to == "boolean") {
    r.i = s.isFloat ? s.d != 0 : s.i != 0;
  } else {
    if (s.isFloat) {
      if (std::isnan(s.d))
        r.i = 0;
      else if (s.d >= 9.2e18)
        r.i = INT64_MAX;
      else if (s.d <= -9.2e18)
        r.i = INT64_MIN;
      else
        r.i = static_cast<std::int64_t>(s.d);
      if (to == "int" && !std::isnan(s.d)) {
        if (s.d >= 2147483647.0) r.i = 2147483647;
        if (s.d <= -2147483648.0) r.i = -2147483648LL;
      }
    } else {
      r.i = s.i;
    }
    r.i = wrap_integral(r.i, to);
  }
  return r;
}

class Runner {
 public:
  Runner(const frontend::ResolvedProgram& rp, const CompiledProgram& cp, const ExecutorLimits& lim)
      : rp_(rp), cp_(cp), lim_(lim) {
    for (const Literal& l : cp.literals) lits_.push_back(parse_literal(l));
  }

  std::vector<ExecutionTrace> run(frontend::MethodRef entry) {
    int method = cp_.byMember.at({entry.cls, entry.member});
    const CompiledMethod& em = cp_.methods[method];
    const auto& md = rp_.method(entry);

    ExecutionContext root;
    Frame f;
    f.method = method;
    f.locals.assign(em.slots, kNoDatum);
    f.loops.assign(em.loops, 0);
    std::vector<DatumId> params;
    int slot = em.isStatic ? 0 : 1;
    if (!em.isStatic) f.locals[0] = symbolic_of(root, rp_.classes[entry.cls].name, 0);
    for (const auto& p : md.params) {
      DatumId d = symbolic_of(root, p.type.str(), kEntryParam);
      params.push_back(d);
      f.locals[slot++] = d;
    }
    root.frames.push_back(std::move(f));
    for (auto it = cp_.staticInit.rbegin(); it != cp_.staticInit.rend(); ++it) push_frame(root, *it, {}, kDiscard);

    std::vector<ExecutionTrace> traces;
    std::vector<ExecutionContext> work;
    work.push_back(std::move(root));
    created_ = 1;
    std::string signature = rp_.signature(entry);
    while (!work.empty()) {
      ExecutionContext ctx = std::move(work.back());
      work.pop_back();
      ExecutionTrace t;
      t.entry = signature;
      t.params = params;
      run_path(ctx, work, t);
      if (t.termination == Termination::Normal && ctx.budgetHit) t.termination = Termination::Budget;
      t.events = std::move(ctx.events);
      t.data.reserve(ctx.heap.size());
      for (const Datum& d : ctx.heap) t.data.push_back(snapshot(d));
      traces.push_back(std::move(t));
    }
    return traces;
  }

 private:
  static DatumInfo snapshot(const Datum& d) {
    DatumInfo i;
    i.id = d.id;
    i.kind = d.kind;
    i.mode = d.mode;
    i.type = d.type;
    i.literal = d.literal();
    i.text = d.text;
    i.hasText = d.hasText;
    i.sourceDefined = d.sourceDefined;
    i.isNull = d.isNull;
    i.flags = d.flags;
    return i;
  }

  // ---- datum construction --------------------------------------------------
  DatumId alloc(ExecutionContext& c, DatumKind kind, Mode mode, const std::string& type) {
    Datum d;
    d.id = static_cast<DatumId>(c.heap.size());
    d.kind = kind;
    d.mode = mode;
    d.type = type;
    d.sourceDefined = declared(type);
    c.heap.push_back(std::move(d));
    return c.heap.back().id;
  }

  bool declared(const std::string& type) const {
    if (type.empty() || is_primitive(type) || type == "String") return false;
    std::string base = type;
    if (base.size() > 2 && base.compare(base.size() - 2, 2, "[]") == 0) base.resize(base.size() - 2);
    return rp_.is_declared(base);
  }

  static bool is_array_type(const std::string& t) { return t.size() > 2 && t.compare(t.size() - 2, 2, "[]") == 0; }

  DatumKind kind_of_type(const std::string& type) const {
    if (type.empty() || type == "?") return DatumKind::Unknown;
    if (is_array_type(type)) return DatumKind::Array;
    if (is_primitive(type)) return DatumKind::Value;
    return DatumKind::Object;
  }

  DatumId symbolic_of(ExecutionContext& c, const std::string& type, std::uint8_t flags) {
    std::string t = type == "?" ? "" : type;
    DatumId id = alloc(c, kind_of_type(t), Mode::Symbolic, t);
    c.at(id).flags = flags;
    return id;
  }

  DatumId concrete_value(ExecutionContext& c, const std::string& type, const Scalar& s) {
    DatumId id = alloc(c, DatumKind::Value, Mode::Concrete, type);
    c.at(id).scalar = s;
    return id;
  }

  DatumId concrete_bool(ExecutionContext& c, bool b) {
    Scalar s;
    s.i = b;
    return concrete_value(c, "boolean", s);
  }

  DatumId concrete_string(ExecutionContext& c, std::string text) {
    DatumId id = alloc(c, DatumKind::Object, Mode::Concrete, "String");
    c.at(id).text = std::move(text);
    c.at(id).hasText = true;
    return id;
  }

  DatumId from_literal(ExecutionContext& c, int idx) {
    const LitVal& l = lits_[idx];
    if (l.kind == DatumKind::Object) {
      if (l.type == "null") return null_datum(c);
      return concrete_string(c, l.text);
    }
    return concrete_value(c, l.type, l.scalar);
  }

  DatumId null_datum(ExecutionContext& c) {
    DatumId id = alloc(c, DatumKind::Object, Mode::Concrete, "null");
    c.at(id).isNull = true;
    return id;
  }

  // First use of an Unknown datum fixes its shape.
  void refine(ExecutionContext& c, DatumId id, const std::string& type) {
    Datum& d = c.at(id);
    if (d.kind != DatumKind::Unknown || type.empty() || type == "?") return;
    d.kind = kind_of_type(type);
    d.type = type;
    d.sourceDefined = declared(type);
  }

  void refine_kind(ExecutionContext& c, DatumId id, DatumKind k) {
    Datum& d = c.at(id);
    if (d.kind == DatumKind::Unknown) d.kind = k;
  }

  // Assignment conversion to a declared type.
  DatumId coerce(ExecutionContext& c, DatumId id, int typeIdx) {
    if (typeIdx < 0) return id;
    return coerce_to(c, id, cp_.str(typeIdx));
  }

  DatumId coerce_to(ExecutionContext& c, DatumId id, const std::string& t) {
    if (id == kNoDatum) return id;
    refine(c, id, t);
    Datum& d = c.at(id);
    if (d.kind == DatumKind::Value && is_primitive(t)) {
      if (d.concrete() && d.type != t && t != "boolean" && d.type != "boolean")
        return concrete_value(c, t, convert(d.scalar, t));
      if (!d.concrete() && d.type.empty()) d.type = t;
    }
    return id;
  }

  void record(ExecutionContext& c, TraceEvent e) { c.events.push_back(std::move(e)); }

  void push_frame(ExecutionContext& c, int method, std::vector<DatumId> args, int flags) {
    const CompiledMethod& m = cp_.methods[method];
    Frame f;
    f.method = method;
    f.flags = flags;
    f.locals.assign(std::max(m.slots, static_cast<int>(args.size())), kNoDatum);
    f.loops.assign(m.loops, 0);
    std::size_t first = (flags & kHasScope) ? 1 : 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
      DatumId a = args[i];
      if (i >= first && i - first < m.paramTypes.size()) a = coerce(c, a, m.paramTypes[i - first]);
      f.locals[i] = a;
    }
    c.frames.push_back(std::move(f));
  }

  int active(const ExecutionContext& c, int method) const {
    int n = 0;
    for (const Frame& f : c.frames) n += f.method == method;
    return n;
  }

  // ---- main loop -------------------------------------------------------------
  void run_path(ExecutionContext& c, std::vector<ExecutionContext>& work, ExecutionTrace& t) {
    while (!c.frames.empty()) {
      if (++c.steps > lim_.instructionLimit) {
        t.termination = Termination::Limit;
        t.diagnostic = "instruction limit reached";
        return;
      }
      Frame& f = c.frames.back();
      const CompiledMethod& m = cp_.methods[f.method];
      if (f.pc >= static_cast<int>(m.code.size())) {
        do_return(c, kNoDatum);
        continue;
      }
      const Instr in = m.code[f.pc++];
      if (!step(c, f, in, work)) {
        t.termination = Termination::Fault;
        t.diagnostic = "line " + std::to_string(in.line) + ": " + fault_;
        return;
      }
    }
  }

  static DatumId pop(Frame& f) {
    DatumId v = f.stack.back();
    f.stack.pop_back();
    return v;
  }

  std::vector<DatumId> pop_n(Frame& f, int n) {
    std::vector<DatumId> v(f.stack.end() - n, f.stack.end());
    f.stack.resize(f.stack.size() - n);
    return v;
  }

  bool fail(const std::string& msg) {
    fault_ = msg;
    return false;
  }

  void do_return(ExecutionContext& c, DatumId value) {
    Frame done = std::move(c.frames.back());
    c.frames.pop_back();
    if (c.frames.empty()) return;
    const CompiledMethod& m = cp_.methods[done.method];
    if (value != kNoDatum && !(done.flags & kDiscard)) c.frames.back().stack.push_back(coerce(c, value, m.returnType));
  }

  // Branch on `cond`; returns whether the true arm is taken by `c`.
  bool branch(ExecutionContext& c, DatumId cond, int trueTarget, int falseTarget, std::vector<ExecutionContext>& work) {
    refine(c, cond, "boolean");
    const Datum& d = c.at(cond);
    if (d.concrete() && d.kind == DatumKind::Value) {
      c.frames.back().pc = d.scalar.i ? trueTarget : falseTarget;
      return d.scalar.i != 0;
    }
    TraceEvent a;
    a.kind = EventKind::Assertion;
    a.operands = {cond};
    if (created_ < lim_.contextBudget) {
      ++created_;
      ExecutionContext other = c;
      a.truth = false;
      other.events.push_back(a);
      other.frames.back().pc = falseTarget;
      work.push_back(std::move(other));
    } else {
      c.budgetHit = true;
    }
    a.truth = true;
    c.events.push_back(a);
    c.frames.back().pc = trueTarget;
    return true;
  }

  std::string api_type(const ExecutionContext& c, DatumId scope) const {
    const Datum& d = c.at(scope);
    if (!d.origin.empty()) return d.origin;
    if (d.sourceDefined) return "Object";
    if (!d.type.empty()) return d.type;
    return "?";
  }

  DatumId binary(ExecutionContext& c, BinaryOp op, DatumId l, DatumId r, int typeIdx) {
    if (op == BinaryOp::Add && (c.at(l).is_string() || c.at(r).is_string())) return concat(c, l, r);
    std::string hint = typeIdx >= 0 ? cp_.str(typeIdx) : "";
    for (DatumId x : {l, r}) {
      if (c.at(x).kind == DatumKind::Unknown) {
        const Datum& other = c.at(x == l ? r : l);
        std::string t = other.kind == DatumKind::Value ? other.type : "";
        if (is_comparison(op) && (op == BinaryOp::And || op == BinaryOp::Or)) t = "boolean";
        if (!is_comparison(op) && !hint.empty()) t = hint;
        refine(c, x, t);
        refine_kind(c, x, DatumKind::Value);
      }
    }
    const Datum& a = c.at(l);
    const Datum& b = c.at(r);
    std::string rtype = hint;
    if (is_comparison(op)) {
      rtype = "boolean";
    } else if (rtype.empty() && a.kind == DatumKind::Value && b.kind == DatumKind::Value && !a.type.empty() &&
               !b.type.empty()) {
      rtype = frontend::promote(a.type, b.type);
    }
    DatumId result = kNoDatum;
    if (a.concrete() && b.concrete() && a.kind == DatumKind::Value && b.kind == DatumKind::Value) {
      result = fold(c, op, l, r, rtype);
    } else if (a.concrete() && b.concrete() && (op == BinaryOp::Eq || op == BinaryOp::Ne)) {
      // reference comparison between concrete objects
      bool same = l == r || (a.hasText && b.hasText && a.text == b.text) || (a.isNull && b.isNull);
      result = concrete_bool(c, op == BinaryOp::Eq ? same : !same);
    }
    if (result == kNoDatum) result = symbolic_of(c, rtype, 0);
    TraceEvent e;
    e.kind = EventKind::PrimaryOperation;
    e.name = op_text(op);
    e.operands = {l, r};
    e.result = result;
    record(c, std::move(e));
    return result;
  }

  // Concrete arithmetic; kNoDatum when the result is not representable.
  DatumId fold(ExecutionContext& c, BinaryOp op, DatumId l, DatumId r, const std::string& rtype) {
    const Datum& a = c.at(l);
    const Datum& b = c.at(r);
    bool fp = a.scalar.isFloat || b.scalar.isFloat;
    std::string t = rtype;
    if (op == BinaryOp::And || op == BinaryOp::Or) {
      bool v = op == BinaryOp::And ? (a.scalar.i && b.scalar.i) : (a.scalar.i || b.scalar.i);
      return concrete_bool(c, v);
    }
    if (is_comparison(op)) {
      int cmp;
      if (fp) {
        double x = as_double(a), y = as_double(b);
        if (std::isnan(x) || std::isnan(y)) return concrete_bool(c, op == BinaryOp::Ne);
        cmp = x < y ? -1 : (x > y ? 1 : 0);
      } else {
        cmp = a.scalar.i < b.scalar.i ? -1 : (a.scalar.i > b.scalar.i ? 1 : 0);
      }
      bool v = false;
      switch (op) {
        case BinaryOp::Lt: v = cmp < 0; break;
        case BinaryOp::Le: v = cmp <= 0; break;
        case BinaryOp::Gt: v = cmp > 0; break;
        case BinaryOp::Ge: v = cmp >= 0; break;
        case BinaryOp::Eq: v = cmp == 0; break;
        case BinaryOp::Ne: v = cmp != 0; break;
        default: break;
      }
      return concrete_bool(c, v);
    }
    if (t.empty() || t == "boolean") t = fp ? "double" : "int";
    Scalar s;
    if (is_floating(t)) {
      double x = as_double(a), y = as_double(b), v = 0;
      switch (op) {
        case BinaryOp::Add: v = x + y; break;
        case BinaryOp::Sub: v = x - y; break;
        case BinaryOp::Mul: v = x * y; break;
        case BinaryOp::Div: v = x / y; break;
        case BinaryOp::Mod: v = std::fmod(x, y); break;
        default: break;
      }
      s.isFloat = true;
      s.d = t == "float" ? static_cast<float>(v) : v;
    } else {
      auto x = static_cast<std::uint64_t>(a.scalar.i), y = static_cast<std::uint64_t>(b.scalar.i);
      std::int64_t v = 0;
      switch (op) {
        case BinaryOp::Add: v = static_cast<std::int64_t>(x + y); break;
        case BinaryOp::Sub: v = static_cast<std::int64_t>(x - y); break;
        case BinaryOp::Mul: v = static_cast<std::int64_t>(x * y); break;
        case BinaryOp::Div:
        case BinaryOp::Mod: {
          std::int64_t p = wrap_integral(a.scalar.i, t), q = wrap_integral(b.scalar.i, t);
          if (q == 0) return kNoDatum;
          if (q == -1) {
            v = op == BinaryOp::Div ? static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(p)) : 0;
          } else {
            v = op == BinaryOp::Div ? p / q : p % q;
          }
          break;
        }
        default: break;
      }
      s.i = wrap_integral(v, t);
    }
    return concrete_value(c, t, s);
  }

  // Ensures `x` is a String, emitting Stringify when it is not.
  DatumId as_string(ExecutionContext& c, DatumId x) {
    Datum& d = c.at(x);
    if (d.kind == DatumKind::Unknown) refine(c, x, "String");
    if (c.at(x).is_string()) return x;
    const Datum& v = c.at(x);
    DatumId s;
    if (v.isNull)
      s = concrete_string(c, "null");
    else if (v.concrete() && v.kind == DatumKind::Value)
      s = concrete_string(c, stringify_scalar(v.scalar, v.type));
    else
      s = symbolic_of(c, "String", 0);
    TraceEvent e;
    e.kind = EventKind::Stringify;
    e.operands = {x};
    e.result = s;
    record(c, std::move(e));
    return s;
  }

  DatumId concat(ExecutionContext& c, DatumId l, DatumId r) {
    l = as_string(c, l);
    r = as_string(c, r);
    const Datum& a = c.at(l);
    const Datum& b = c.at(r);
    DatumId result = (a.hasText && b.hasText) ? concrete_string(c, a.text + b.text) : symbolic_of(c, "String", 0);
    TraceEvent e;
    e.kind = EventKind::StringConcat;
    e.operands = {l, r};
    e.result = result;
    record(c, std::move(e));
    return result;
  }

  DatumId unary(ExecutionContext& c, UnaryOp op, DatumId v, int typeIdx) {
    std::string hint = typeIdx >= 0 ? cp_.str(typeIdx) : "";
    if (c.at(v).kind == DatumKind::Unknown) {
      refine(c, v, op == UnaryOp::Not ? "boolean" : hint);
      refine_kind(c, v, DatumKind::Value);
    }
    const Datum& d = c.at(v);
    DatumId result;
    std::string t = op == UnaryOp::Not ? "boolean" : (hint.empty() ? d.type : hint);
    if (d.concrete() && d.kind == DatumKind::Value) {
      Scalar s = d.scalar;
      if (op == UnaryOp::Not) {
        s.i = !s.i;
      } else if (s.isFloat) {
        s.d = -s.d;
      } else {
        s.i = wrap_integral(static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(s.i)), t.empty() ? "int" : t);
      }
      result = concrete_value(c, t.empty() ? "int" : t, s);
    } else {
      result = symbolic_of(c, t, 0);
    }
    TraceEvent e;
    e.kind = EventKind::PrimaryOperation;
    e.name = op == UnaryOp::Not ? "!" : "u-";
    e.operands = {v};
    e.result = result;
    record(c, std::move(e));
    return result;
  }

  bool require_object(ExecutionContext& c, DatumId id, const char* what) {
    refine_kind(c, id, DatumKind::Object);
    if (c.at(id).isNull) return fail(std::string("null dereference in ") + what);
    return true;
  }

  // Member read with memoized symbolic fallback.
  DatumId member_or_fresh(ExecutionContext& c, DatumId owner, const std::string& key, const std::string& type) {
    DatumId v = c.at(owner).member(key);
    if (v != kNoDatum) return v;
    v = symbolic_of(c, type, 0);
    c.at(owner).set_member(key, v);
    return v;
  }

  static std::string element_type(const std::string& arrayType) {
    if (arrayType.size() > 2 && arrayType.compare(arrayType.size() - 2, 2, "[]") == 0)
      return arrayType.substr(0, arrayType.size() - 2);
    return "";
  }

  std::string index_key(const ExecutionContext& c, DatumId idx) const {
    const Datum& d = c.at(idx);
    if (d.concrete() && d.kind == DatumKind::Value) return std::to_string(d.scalar.i);
    return "#" + std::to_string(idx);
  }

  bool step(ExecutionContext& c, Frame& f, const Instr& in, std::vector<ExecutionContext>& work) {
    switch (in.op) {
      case Op::PushLit:
        f.stack.push_back(from_literal(c, in.a));
        return true;
      case Op::PushNull:
        f.stack.push_back(null_datum(c));
        return true;
      case Op::Load: {
        DatumId v = f.locals[in.a];
        if (v == kNoDatum) {
          v = symbolic_of(c, "", 0);
          c.frames.back().locals[in.a] = v;
        }
        c.frames.back().stack.push_back(v);
        return true;
      }
      case Op::Store: {
        DatumId v = pop(f);
        v = coerce(c, v, in.b);
        c.frames.back().locals[in.a] = v;
        return true;
      }
      case Op::GetField: {
        DatumId obj = pop(f);
        if (!require_object(c, obj, "field read")) return false;
        const std::string& name = cp_.str(in.a);
        DatumId v = member_or_fresh(c, obj, name, in.b >= 0 ? cp_.str(in.b) : "");
        TraceEvent e;
        e.kind = EventKind::FieldAccess;
        e.scope = obj;
        e.name = name;
        e.datum = v;
        record(c, std::move(e));
        c.frames.back().stack.push_back(v);
        return true;
      }
      case Op::PutField: {
        DatumId v = pop(f);
        DatumId obj = pop(f);
        if (!require_object(c, obj, "field write")) return false;
        v = coerce(c, v, in.b);
        const std::string& name = cp_.str(in.a);
        c.at(obj).set_member(name, v);
        TraceEvent e;
        e.kind = EventKind::FieldAccess;
        e.write = true;
        e.scope = obj;
        e.name = name;
        e.datum = v;
        record(c, std::move(e));
        return true;
      }
      case Op::ZeroField: {
        DatumId obj = pop(f);
        const std::string& t = cp_.str(in.b);
        DatumId z = concrete_value(c, t, zero_scalar(t));
        c.at(obj).set_member(cp_.str(in.a), z);
        return true;
      }
      case Op::GetStatic: {
        const std::string& name = cp_.str(in.a);
        const std::string& owner = cp_.str(in.b);
        std::string key = owner + "." + name;
        DatumId v = c.static_slot(key);
        if (v == kNoDatum) {
          v = symbolic_of(c, in.c >= 0 ? cp_.str(in.c) : "", 0);
          if (!rp_.is_declared(owner)) {
            c.at(v).origin = key;
            refine_kind(c, v, DatumKind::Object);
          }
          c.set_static(key, v);
        }
        TraceEvent e;
        e.kind = EventKind::FieldAccess;
        e.staticType = owner;
        e.name = name;
        e.datum = v;
        record(c, std::move(e));
        f.stack.push_back(v);
        return true;
      }
      case Op::PutStatic: {
        DatumId v = coerce(c, pop(f), in.c);
        const std::string& name = cp_.str(in.a);
        const std::string& owner = cp_.str(in.b);
        c.set_static(owner + "." + name, v);
        TraceEvent e;
        e.kind = EventKind::FieldAccess;
        e.write = true;
        e.staticType = owner;
        e.name = name;
        e.datum = v;
        record(c, std::move(e));
        return true;
      }
      case Op::ZeroStatic: {
        const std::string& t = cp_.str(in.c);
        DatumId z = concrete_value(c, t, zero_scalar(t));
        c.set_static(cp_.str(in.b) + "." + cp_.str(in.a), z);
        return true;
      }
      case Op::TypeName: {
        const std::string& name = cp_.str(in.a);
        DatumId v = c.static_slot(name);
        if (v == kNoDatum) {
          v = symbolic_of(c, "", 0);
          c.at(v).origin = name;
          c.at(v).kind = DatumKind::Object;
          c.set_static(name, v);
        }
        f.stack.push_back(v);
        return true;
      }
      case Op::ArrayLoad: {
        DatumId idx = pop(f);
        DatumId arr = pop(f);
        refine_kind(c, arr, DatumKind::Array);
        if (c.at(arr).isNull) return fail("null dereference in array read");
        refine(c, idx, "int");
        refine_kind(c, idx, DatumKind::Value);
        std::string et = in.b >= 0 ? cp_.str(in.b) : element_type(c.at(arr).type);
        DatumId v = member_or_fresh(c, arr, index_key(c, idx), et);
        TraceEvent e;
        e.kind = EventKind::ArrayAccess;
        e.scope = arr;
        e.index = idx;
        e.datum = v;
        record(c, std::move(e));
        f.stack.push_back(v);
        return true;
      }
      case Op::ArrayStore: {
        DatumId v = pop(f);
        DatumId idx = pop(f);
        DatumId arr = pop(f);
        refine_kind(c, arr, DatumKind::Array);
        if (c.at(arr).isNull) return fail("null dereference in array write");
        refine(c, idx, "int");
        refine_kind(c, idx, DatumKind::Value);
        v = coerce(c, v, in.b);
        c.at(arr).set_member(index_key(c, idx), v);
        TraceEvent e;
        e.kind = EventKind::ArrayAccess;
        e.write = true;
        e.scope = arr;
        e.index = idx;
        e.datum = v;
        record(c, std::move(e));
        return true;
      }
      case Op::ArrayLength: {
        DatumId arr = pop(f);
        refine_kind(c, arr, DatumKind::Array);
        if (c.at(arr).isNull) return fail("null dereference in array length");
        DatumId v = member_or_fresh(c, arr, "length", "int");
        TraceEvent e;
        e.kind = EventKind::FieldAccess;
        e.scope = arr;
        e.name = "length";
        e.datum = v;
        record(c, std::move(e));
        f.stack.push_back(v);
        return true;
      }
      case Op::Binary: {
        DatumId r = pop(f);
        DatumId l = pop(f);
        f.stack.push_back(binary(c, static_cast<BinaryOp>(in.a), l, r, in.b));
        return true;
      }
      case Op::Unary: {
        DatumId v = pop(f);
        f.stack.push_back(unary(c, static_cast<UnaryOp>(in.a), v, in.b));
        return true;
      }
      case Op::Concat: {
        DatumId r = pop(f);
        DatumId l = pop(f);
        f.stack.push_back(concat(c, l, r));
        return true;
      }
      case Op::Cast: {
        DatumId v = pop(f);
        const std::string& t = cp_.str(in.a);
        refine(c, v, t);
        const Datum& d = c.at(v);
        if (d.concrete() && d.kind == DatumKind::Value && d.type != t)
          v = concrete_value(c, t, convert(d.scalar, t));
        f.stack.push_back(v);
        return true;
      }
      case Op::Refine: {
        refine(c, f.stack.back(), cp_.str(in.a));
        return true;
      }
      case Op::Invoke:
      case Op::InvokeVirtual: {
        int argc = in.b + ((in.c & kHasScope) ? 1 : 0);
        std::vector<DatumId> args = pop_n(f, argc);
        int target = in.a;
        if (in.c & kHasScope) {
          if (!require_object(c, args[0], "method call")) return false;
          if (in.op == Op::InvokeVirtual) {
            const Datum& recv = c.at(args[0]);
            int cls = recv.sourceDefined && recv.concrete() ? rp_.find_class(recv.type) : -1;
            if (cls >= 0) {
              int d = cp_.dispatch(cls, cp_.methods[target].name, in.b);
              if (d >= 0) target = d;
            } else if (recv.kind == DatumKind::Object && recv.type.empty()) {
              refine(c, args[0], rp_.classes[cp_.methods[target].cls].name);
            }
          }
        }
        call(c, target, std::move(args), in.c);
        return true;
      }
      case Op::InvokeApi: {
        bool scoped = in.c & kHasScope;
        std::vector<DatumId> args = pop_n(f, in.b);
        DatumId scope = kNoDatum;
        if (scoped) {
          scope = pop(f);
          if (!require_object(c, scope, "API call")) return false;
        }
        std::string sig = cp_.str(in.a);
        if (sig.compare(0, 2, "?.") == 0 && scope != kNoDatum) sig = api_type(c, scope) + sig.substr(1);
        TraceEvent e;
        e.kind = EventKind::ApiCall;
        e.signature = sig;
        e.scope = scope;
        e.operands = args;
        if (!(in.c & kDiscard)) {
          e.result = symbolic_of(c, "", kSynthetic);
          c.frames.back().stack.push_back(e.result);
        }
        record(c, std::move(e));
        return true;
      }
      case Op::NewObject: {
        std::vector<DatumId> args = pop_n(f, in.b);
        DatumId obj = alloc(c, DatumKind::Object, Mode::Concrete, rp_.classes[in.a].name);
        f.stack.push_back(obj);
        args.insert(args.begin(), obj);
        int target = in.c;
        if (target < 0) {
          target = cp_.implicitCtor[in.a];
          args.resize(1);
        }
        call(c, target, std::move(args), kDiscard | kHasScope);
        return true;
      }
      case Op::NewApiObject: {
        std::vector<DatumId> args = pop_n(f, in.b);
        const std::string& type = cp_.str(in.a);
        DatumId obj = symbolic_of(c, type, kSynthetic);
        TraceEvent e;
        e.kind = EventKind::ApiCall;
        e.signature = type + ".<init>/" + std::to_string(in.b);
        e.operands = args;
        e.result = obj;
        record(c, std::move(e));
        f.stack.push_back(obj);
        return true;
      }
      case Op::NewArray: {
        DatumId size = pop(f);
        refine(c, size, "int");
        refine_kind(c, size, DatumKind::Value);
        DatumId arr = alloc(c, DatumKind::Array, Mode::Symbolic, cp_.str(in.a) + "[]");
        c.at(arr).set_member("length", size);
        f.stack.push_back(arr);
        return true;
      }
      case Op::NewArrayInit: {
        std::vector<DatumId> els = pop_n(f, in.b);
        std::string et = cp_.str(in.a);
        DatumId arr = alloc(c, DatumKind::Array, Mode::Symbolic, et + "[]");
        Scalar len;
        len.i = in.b;
        DatumId lenId = concrete_value(c, "int", len);
        c.at(arr).set_member("length", lenId);
        for (int i = 0; i < in.b; ++i) {
          Scalar s;
          s.i = i;
          DatumId idx = concrete_value(c, "int", s);
          DatumId v = et == "?" ? els[i] : coerce_to(c, els[i], et);
          c.at(arr).set_member(std::to_string(i), v);
          TraceEvent e;
          e.kind = EventKind::ArrayAccess;
          e.write = true;
          e.scope = arr;
          e.index = idx;
          e.datum = v;
          record(c, std::move(e));
        }
        c.frames.back().stack.push_back(arr);
        return true;
      }
      case Op::Jump:
        f.pc = in.a;
        return true;
      case Op::JumpIfFalse: {
        DatumId cond = pop(f);
        branch(c, cond, f.pc, in.a, work);
        return true;
      }
      case Op::JumpIfTrue: {
        DatumId cond = pop(f);
        branch(c, cond, in.a, f.pc, work);
        return true;
      }
      case Op::Short: {
        DatumId v = f.stack.back();
        refine(c, v, "boolean");
        const Datum& d = c.at(v);
        if (d.concrete() && d.kind == DatumKind::Value) {
          bool decisive = in.a ? !d.scalar.i : d.scalar.i != 0;
          if (decisive) {
            f.pc = in.c;
          } else {
            f.stack.pop_back();
          }
        } else {
          f.pc = in.b;
        }
        return true;
      }
      case Op::LoopEnter:
        f.loops[in.a] = 0;
        return true;
      case Op::LoopCheck:
        if (++f.loops[in.a] + in.c > lim_.loopBound) f.pc = in.b;
        return true;
      case Op::Dup:
        f.stack.push_back(f.stack.back());
        return true;
      case Op::Dup2: {
        std::size_t n = f.stack.size();
        DatumId a = f.stack[n - 2], b = f.stack[n - 1];
        f.stack.push_back(a);
        f.stack.push_back(b);
        return true;
      }
      case Op::DupX1: {
        DatumId top = f.stack.back();
        f.stack.insert(f.stack.end() - 2, top);
        return true;
      }
      case Op::DupX2: {
        DatumId top = f.stack.back();
        f.stack.insert(f.stack.end() - 3, top);
        return true;
      }
      case Op::Pop:
        f.stack.pop_back();
        return true;
      case Op::Return: {
        DatumId v = in.a ? pop(f) : kNoDatum;
        do_return(c, v);
        return true;
      }
      case Op::EqNull: {
        DatumId v = pop(f);
        bool isNull = c.at(v).isNull;
        f.stack.push_back(concrete_bool(c, in.a ? isNull : !isNull));
        return true;
      }
    }
    return fail("unknown instruction");
  }

  void call(ExecutionContext& c, int target, std::vector<DatumId> args, int flags) {
    const CompiledMethod& m = cp_.methods[target];
    if (active(c, target) >= lim_.recursionBound) {
      if (m.returnsValue && !(flags & kDiscard))
        c.frames.back().stack.push_back(symbolic_of(c, m.returnType >= 0 ? cp_.str(m.returnType) : "", 0));
      return;
    }
    push_frame(c, target, std::move(args), flags);
  }

  const frontend::ResolvedProgram& rp_;
  const CompiledProgram& cp_;
  ExecutorLimits lim_;
  std::vector<LitVal> lits_;
  int created_ = 0;
  std::string fault_;
};

}  // namespace

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::ApiCall: return "ApiCall";
    case EventKind::FieldAccess: return "FieldAccess";
    case EventKind::ArrayAccess: return "ArrayAccess";
    case EventKind::PrimaryOperation: return "PrimaryOperation";
    case EventKind::StringConcat: return "StringConcat";
    case EventKind::Stringify: return "Stringify";
    case EventKind::Assertion: return "Assertion";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Normal: return "Normal";
    case Termination::Budget: return "Budget";
    case Termination::Limit: return "Limit";
    case Termination::Fault: return "Fault";
  }
  return "?";
}

std::vector<ExecutionTrace> execute_entry(const frontend::ResolvedProgram& program, const CompiledProgram& compiled,
                                          frontend::MethodRef entry, const ExecutorLimits& limits) {
  if (limits.loopBound < 1 || limits.recursionBound < 1 || limits.contextBudget < 1)
    throw ExecutionError("executor limits must be positive");
  Runner r(program, compiled, limits);
  return r.run(entry);
}

std::vector<ExecutionTrace> execute_program(const frontend::ResolvedProgram& program, const ExecutorLimits& limits) {
  if (program.entryPoints.empty()) throw ExecutionError("program has no entry points");
  CompiledProgram cp = compile_program(program);
  std::vector<ExecutionTrace> out;
  for (const auto& e : program.entryPoints) {
    auto ts = execute_entry(program, cp, e, limits);
    for (auto& t : ts) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace bsim::executor
