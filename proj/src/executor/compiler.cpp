#include "bsim/executor/compiler.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace bsim::executor {

using namespace frontend;

int CompiledProgram::intern(const std::string& s) {
  for (std::size_t i = 0; i < strings.size(); ++i)
    if (strings[i] == s) return static_cast<int>(i);
  strings.push_back(s);
  return static_cast<int>(strings.size() - 1);
}

int CompiledProgram::dispatch(int cls, const std::string& name, std::size_t arity) const {
  MethodRef r = program->find_method(cls, name, arity);
  if (r.member < 0) return -1;
  auto it = byMember.find({r.cls, r.member});
  return it == byMember.end() ? -1 : it->second;
}

namespace {

// Literal (or negated numeric literal) usable as a compile-time constant.
std::optional<Literal> constant_literal(const Expr& e) {
  if (const auto* p = e.as<ParenExpr>()) return constant_literal(*p->inner);
  if (const auto* l = e.as<LiteralExpr>()) {
    if (l->value.kind == LiteralKind::Null) return std::nullopt;
    return l->value;
  }
  if (const auto* u = e.as<UnaryExpr>()) {
    if (u->op != UnaryOp::Minus) return std::nullopt;
    auto inner = constant_literal(*u->operand);
    if (!inner) return std::nullopt;
    switch (inner->kind) {
      case LiteralKind::Int:
      case LiteralKind::Long:
      case LiteralKind::Float:
      case LiteralKind::Double:
        break;
      default:
        return std::nullopt;
    }
    if (!inner->spelling.empty() && inner->spelling[0] == '-')
      inner->spelling.erase(0, 1);
    else
      inner->spelling.insert(0, "-");
    return inner;
  }
  return std::nullopt;
}

class MethodCompiler {
 public:
  MethodCompiler(CompiledProgram& cp, const ResolvedProgram& rp, CompiledMethod& m, int cls)
      : cp_(cp), rp_(rp), b_(rp.bindings), m_(m), cls_(cls) {}

  void add_param(NodeUid uid) { slots_[uid] = m_.slots++; }
  void add_this() { m_.slots++; }

  int emit(Op op, int a = 0, int b = -1, int c = 0) {
    m_.code.push_back(Instr{op, a, b, c, line_});
    return static_cast<int>(m_.code.size() - 1);
  }
  int here() const { return static_cast<int>(m_.code.size()); }
  void patch_a(int at, int target) { m_.code[at].a = target; }

  int type_index(const TypeRef& t) {
    if (is_unknown(t)) return -1;
    return cp_.intern(t.str());
  }

  void finish() {
    if (m_.code.empty() || m_.code.back().op != Op::Return) emit(Op::Return, 0);
  }

  // ---- statements ----------------------------------------------------------
  void stmt(const Stmt& s) {
    line_ = s.pos.line;
    std::visit([&](const auto& n) { stmt_node(s, n); }, s.node);
  }

  void stmt_node(const Stmt&, const BlockStmt& n) {
    for (const Stmt& x : n.stmts) stmt(x);
  }

  void stmt_node(const Stmt&, const LocalVarStmt& n) {
    for (const VarDeclarator& v : n.vars) {
      int slot = m_.slots++;
      slots_[v.uid] = slot;
      if (v.init) {
        expr(*v.init);
        emit(Op::Store, slot, type_index(n.type));
      }
    }
  }

  void stmt_node(const Stmt&, const ExprStmt& n) { expr(n.expr, true); }

  void stmt_node(const Stmt&, const IfStmt& n) {
    expr(n.cond);
    int jf = emit(Op::JumpIfFalse);
    stmt(*n.thenStmt);
    if (n.elseStmt) {
      int j = emit(Op::Jump);
      patch_a(jf, here());
      stmt(**n.elseStmt);
      patch_a(j, here());
    } else {
      patch_a(jf, here());
    }
  }

  void stmt_node(const Stmt&, const WhileStmt& n) {
    int loop = m_.loops++;
    emit(Op::LoopEnter, loop);
    int head = here();
    int check = emit(Op::LoopCheck, loop, -1, 0);
    expr(n.cond);
    int jf = emit(Op::JumpIfFalse);
    push_target(true);
    stmt(*n.body);
    emit(Op::Jump, head);
    int exit = here();
    m_.code[check].b = exit;
    patch_a(jf, exit);
    pop_target(exit, head);
  }

  void stmt_node(const Stmt&, const DoWhileStmt& n) {
    int loop = m_.loops++;
    emit(Op::LoopEnter, loop);
    int start = here();
    push_target(true);
    stmt(*n.body);
    int cont = here();
    int check = emit(Op::LoopCheck, loop, -1, 1);
    expr(n.cond);
    emit(Op::JumpIfTrue, start);
    int exit = here();
    m_.code[check].b = exit;
    pop_target(exit, cont);
  }

  void stmt_node(const Stmt&, const ForStmt& n) {
    for (const Stmt& i : n.init) stmt(i);
    int loop = m_.loops++;
    emit(Op::LoopEnter, loop);
    int head = here();
    int check = emit(Op::LoopCheck, loop, -1, 0);
    int jf = -1;
    if (n.cond) {
      expr(*n.cond);
      jf = emit(Op::JumpIfFalse);
    }
    push_target(true);
    stmt(*n.body);
    int cont = here();
    for (const Expr& u : n.update) expr(u, true);
    emit(Op::Jump, head);
    int exit = here();
    m_.code[check].b = exit;
    if (jf >= 0) patch_a(jf, exit);
    pop_target(exit, cont);
  }

  // Lowered as `for (int i = 0; i < a.length; i++) { T v = a[i]; body }`.
  void stmt_node(const Stmt& s, const ForEachStmt& n) {
    int arr = m_.slots++;
    int idx = m_.slots++;
    int var = m_.slots++;
    slots_[s.uid] = var;
    expr(n.iterable);
    emit(Op::Store, arr, -1);
    emit(Op::PushLit, literal({LiteralKind::Int, "0"}));
    emit(Op::Store, idx, cp_.intern("int"));
    int loop = m_.loops++;
    emit(Op::LoopEnter, loop);
    int head = here();
    int check = emit(Op::LoopCheck, loop, -1, 0);
    emit(Op::Load, idx);
    emit(Op::Load, arr);
    emit(Op::ArrayLength);
    emit(Op::Binary, static_cast<int>(BinaryOp::Lt), cp_.intern("boolean"));
    int jf = emit(Op::JumpIfFalse);
    emit(Op::Load, arr);
    emit(Op::Load, idx);
    emit(Op::ArrayLoad, 0, type_index(n.type));
    emit(Op::Store, var, type_index(n.type));
    push_target(true);
    stmt(*n.body);
    int cont = here();
    emit(Op::Load, idx);
    emit(Op::PushLit, literal({LiteralKind::Int, "1"}));
    emit(Op::Binary, static_cast<int>(BinaryOp::Add), cp_.intern("int"));
    emit(Op::Store, idx, cp_.intern("int"));
    emit(Op::Jump, head);
    int exit = here();
    m_.code[check].b = exit;
    patch_a(jf, exit);
    pop_target(exit, cont);
  }

  // Sequential `==` tests, then jumps into fall-through bodies.
  void stmt_node(const Stmt&, const SwitchStmt& n) {
    int sel = m_.slots++;
    expr(n.selector);
    emit(Op::Store, sel, -1);
    std::vector<int> toBody(n.cases.size(), -1);
    int defaultCase = -1;
    for (std::size_t i = 0; i < n.cases.size(); ++i) {
      const SwitchCase& c = n.cases[i];
      if (!c.label) {
        defaultCase = static_cast<int>(i);
        continue;
      }
      line_ = c.label->pos.line;
      emit(Op::Load, sel);
      expr(*c.label);
      emit(Op::Binary, static_cast<int>(BinaryOp::Eq), cp_.intern("boolean"));
      toBody[i] = emit(Op::JumpIfTrue);
    }
    int toDefault = emit(Op::Jump);
    push_target(false);
    std::vector<int> bodyStart(n.cases.size());
    for (std::size_t i = 0; i < n.cases.size(); ++i) {
      bodyStart[i] = here();
      for (const Stmt& x : n.cases[i].body) stmt(x);
    }
    int exit = here();
    for (std::size_t i = 0; i < n.cases.size(); ++i)
      if (toBody[i] >= 0) patch_a(toBody[i], bodyStart[i]);
    patch_a(toDefault, defaultCase >= 0 ? bodyStart[defaultCase] : exit);
    pop_target(exit, -1);
  }

  void stmt_node(const Stmt&, const ReturnStmt& n) {
    if (n.value) {
      expr(*n.value);
      emit(Op::Return, 1);
    } else {
      emit(Op::Return, 0);
    }
  }

  void stmt_node(const Stmt& s, const BreakStmt&) {
    if (targets_.empty()) throw std::runtime_error("line " + std::to_string(s.pos.line) + ": break outside loop or switch");
    targets_.back().breaks.push_back(emit(Op::Jump));
  }

  void stmt_node(const Stmt& s, const ContinueStmt&) {
    for (auto t = targets_.rbegin(); t != targets_.rend(); ++t) {
      if (t->loop) {
        t->continues.push_back(emit(Op::Jump));
        return;
      }
    }
    throw std::runtime_error("line " + std::to_string(s.pos.line) + ": continue outside loop");
  }

  void stmt_node(const Stmt&, const EmptyStmt&) {}

  struct Target {
    bool loop;
    std::vector<int> breaks;
    std::vector<int> continues;
  };
  void push_target(bool loop) { targets_.push_back(Target{loop, {}, {}}); }
  void pop_target(int breakTo, int continueTo) {
    Target t = std::move(targets_.back());
    targets_.pop_back();
    for (int j : t.breaks) patch_a(j, breakTo);
    for (int j : t.continues) patch_a(j, continueTo);
  }

  // ---- expressions -----------------------------------------------------------
  int literal(const Literal& l) {
    for (std::size_t i = 0; i < cp_.literals.size(); ++i)
      if (cp_.literals[i].kind == l.kind && cp_.literals[i].spelling == l.spelling) return static_cast<int>(i);
    cp_.literals.push_back(l);
    return static_cast<int>(cp_.literals.size() - 1);
  }

  const ExprInfo& info(const Expr& e) const { return b_.at(e.uid); }

  // Field declaration behind a field binding.
  const FieldInfo* field_info(int cls, const std::string& name) const {
    auto [fc, fi] = rp_.find_field(cls, name);
    if (fc < 0) return nullptr;
    return &rp_.classes[fc].fields[fi];
  }

  std::optional<Literal> inlined_constant(int cls, const std::string& name) const {
    const FieldInfo* f = field_info(cls, name);
    if (!f || !f->mods.isStatic || !f->mods.isFinal) return std::nullopt;
    const auto& fd = std::get<FieldDecl>(rp_.decl(f_cls(cls, name)).members[f->member].node);
    const auto& init = fd.vars[f->declarator].init;
    if (!init) return std::nullopt;
    return constant_literal(*init);
  }
  int f_cls(int cls, const std::string& name) const { return rp_.find_field(cls, name).first; }

  void pop_if(bool discard) {
    if (discard) emit(Op::Pop);
  }

  void expr(const Expr& e, bool discard = false) {
    if (e.pos.line) line_ = e.pos.line;
    std::visit([&](const auto& n) { expr_node(e, n, discard); }, e.node);
  }

  void expr_node(const Expr&, const LiteralExpr& n, bool discard) {
    if (discard) return;
    if (n.value.kind == LiteralKind::Null)
      emit(Op::PushNull);
    else
      emit(Op::PushLit, literal(n.value));
  }

  // Pushes the value of a static field of declared class `cls`.
  void load_static(int cls, const std::string& name) {
    if (auto lit = inlined_constant(cls, name)) {
      emit(Op::PushLit, literal(*lit));
      return;
    }
    const FieldInfo* f = field_info(cls, name);
    int owner = f_cls(cls, name);
    emit(Op::GetStatic, cp_.intern(name), cp_.intern(rp_.classes[owner].name), f ? type_index(f->type) : -1);
  }

  void expr_node(const Expr& e, const NameExpr& n, bool discard) {
    const ExprInfo& i = info(e);
    switch (i.name) {
      case NameKind::Local:
        if (!discard) emit(Op::Load, slot_of(i.local, e));
        return;
      case NameKind::Field:
        if (i.isStatic || m_.isStatic) {
          load_static(i.fieldClass, n.name);
        } else {
          emit(Op::Load, 0);
          emit(Op::GetField, cp_.intern(n.name), type_index(i.type));
        }
        pop_if(discard);
        return;
      default:
        emit(Op::TypeName, cp_.intern(n.name));
        pop_if(discard);
        return;
    }
  }

  int slot_of(NodeUid local, const Expr& e) const {
    auto it = slots_.find(local);
    if (it == slots_.end())
      throw std::runtime_error("line " + std::to_string(e.pos.line) + ": local used outside its scope");
    return it->second;
  }

  void expr_node(const Expr&, const ThisExpr&, bool discard) {
    if (!discard) emit(Op::Load, 0);
  }

  bool is_type_target(const Expr& t) const { return info(t).name == NameKind::Type; }

  void expr_node(const Expr& e, const FieldAccessExpr& n, bool discard) {
    const ExprInfo& i = info(e);
    const Expr& target = *n.target;
    if (is_type_target(target)) {
      const std::string& tn = info(target).typeName;
      int cls = rp_.find_class(tn);
      if (cls >= 0 && i.name == NameKind::Field)
        load_static(i.fieldClass, n.name);
      else
        emit(Op::GetStatic, cp_.intern(n.name), cp_.intern(tn), -1);
      pop_if(discard);
      return;
    }
    if (i.name == NameKind::Field && i.isStatic) {
      expr(target, true);
      load_static(i.fieldClass, n.name);
      pop_if(discard);
      return;
    }
    expr(target);
    if (info(target).type.array && n.name == "length")
      emit(Op::ArrayLength);
    else
      emit(Op::GetField, cp_.intern(n.name), type_index(i.type));
    pop_if(discard);
  }

  void expr_node(const Expr& e, const ArrayAccessExpr& n, bool discard) {
    expr(*n.array);
    expr(*n.index);
    emit(Op::ArrayLoad, 0, type_index(info(e).type));
    pop_if(discard);
  }

  void expr_node(const Expr& e, const CallExpr& n, bool discard) {
    const ExprInfo& i = info(e);
    int flags = discard ? kDiscard : 0;
    if (i.call == CallKind::Declared) {
      const MethodDecl& md = rp_.method({i.callClass, i.callMember});
      int target = cp_.byMember.at({i.callClass, i.callMember});
      if (md.mods.isStatic) {
        if (n.target && !is_type_target(**n.target)) expr(**n.target, true);
        for (const Expr& a : n.args) expr(a);
        emit(Op::Invoke, target, static_cast<int>(n.args.size()), flags);
      } else {
        if (n.target)
          expr(**n.target);
        else
          emit(Op::Load, 0);
        for (const Expr& a : n.args) expr(a);
        emit(Op::InvokeVirtual, target, static_cast<int>(n.args.size()), flags | kHasScope);
      }
      // A void method in value position cannot occur in well-typed code.
      return;
    }
    std::string type = i.apiType.empty() ? "?" : i.apiType;
    bool scoped = false;
    if (n.target) {
      if (is_type_target(**n.target)) {
        type = info(**n.target).typeName;
        if (rp_.is_declared(type)) type = "?";  // undeclared static method of a declared class
      } else {
        expr(**n.target);
        scoped = true;
      }
    } else if (!m_.isStatic) {
      emit(Op::Load, 0);
      scoped = true;
      type = "Object";
    } else {
      type = "?";
    }
    for (const Expr& a : n.args) expr(a);
    std::string sig = type + "." + n.name + "/" + std::to_string(n.args.size());
    emit(Op::InvokeApi, cp_.intern(sig), static_cast<int>(n.args.size()), flags | (scoped ? kHasScope : 0));
  }

  void expr_node(const Expr& e, const NewObjectExpr& n, bool discard) {
    int cls = rp_.find_class(n.type.name);
    for (const Expr& a : n.args) expr(a);
    int argc = static_cast<int>(n.args.size());
    if (cls >= 0) {
      MethodRef ctor = rp_.find_constructor(cls, n.args.size());
      int target = ctor.member >= 0 ? cp_.byMember.at({ctor.cls, ctor.member}) : -1;
      emit(Op::NewObject, cls, argc, target);
    } else {
      emit(Op::NewApiObject, cp_.intern(n.type.name), argc);
    }
    (void)e;
    pop_if(discard);
  }

  void expr_node(const Expr&, const NewArrayExpr& n, bool discard) {
    if (n.size) {
      expr(**n.size);
      emit(Op::NewArray, cp_.intern(n.elementType.name));
    } else {
      const auto& els = n.init ? n.init->elements : std::vector<Expr>{};
      for (const Expr& x : els) expr(x);
      emit(Op::NewArrayInit, cp_.intern(n.elementType.name), static_cast<int>(els.size()));
    }
    pop_if(discard);
  }

  void expr_node(const Expr& e, const ArrayInitExpr& n, bool discard) {
    TypeRef t = info(e).type;
    for (const Expr& x : n.elements) expr(x);
    emit(Op::NewArrayInit, cp_.intern(is_unknown(t) ? "?" : t.name), static_cast<int>(n.elements.size()));
    pop_if(discard);
  }

  void expr_node(const Expr& e, const UnaryExpr& n, bool discard) {
    switch (n.op) {
      case UnaryOp::Plus:
        expr(*n.operand, discard);
        return;
      case UnaryOp::Minus: {
        if (auto lit = constant_literal(e)) {
          if (!discard) emit(Op::PushLit, literal(*lit));
          return;
        }
        // negated constant field
        const ExprInfo& oi = info(*n.operand);
        if (oi.name == NameKind::Field && oi.isStatic) {
          const std::string* nm = nullptr;
          if (const auto* ne = n.operand->as<NameExpr>()) nm = &ne->name;
          if (const auto* fa = n.operand->as<FieldAccessExpr>()) nm = &fa->name;
          if (nm) {
            if (auto lit = inlined_constant(oi.fieldClass, *nm)) {
              Expr tmp = make_expr(UnaryExpr{UnaryOp::Minus, make_expr(LiteralExpr{*lit})});
              if (auto neg = constant_literal(tmp)) {
                if (!discard) emit(Op::PushLit, literal(*neg));
                return;
              }
            }
          }
        }
        expr(*n.operand);
        emit(Op::Unary, static_cast<int>(n.op), type_index(info(e).type));
        pop_if(discard);
        return;
      }
      case UnaryOp::Not:
        expr(*n.operand);
        emit(Op::Unary, static_cast<int>(n.op), cp_.intern("boolean"));
        pop_if(discard);
        return;
      case UnaryOp::PreInc:
      case UnaryOp::PreDec:
      case UnaryOp::PostInc:
      case UnaryOp::PostDec: {
        bool post = n.op == UnaryOp::PostInc || n.op == UnaryOp::PostDec;
        BinaryOp bop = (n.op == UnaryOp::PreInc || n.op == UnaryOp::PostInc) ? BinaryOp::Add : BinaryOp::Sub;
        update(*n.operand, bop, nullptr, !discard, post);
        return;
      }
    }
  }

  static bool is_null_literal(const Expr& e) {
    if (const auto* p = e.as<ParenExpr>()) return is_null_literal(*p->inner);
    const auto* l = e.as<LiteralExpr>();
    return l && l->value.kind == LiteralKind::Null;
  }

  void expr_node(const Expr& e, const BinaryExpr& n, bool discard) {
    if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
      expr(*n.lhs);
      int sc = emit(Op::Short, n.op == BinaryOp::And ? 1 : 0, -1, -1);
      expr(*n.rhs);
      int j = emit(Op::Jump);
      m_.code[sc].b = here();
      expr(*n.rhs);
      emit(Op::Binary, static_cast<int>(n.op), cp_.intern("boolean"));
      int end = here();
      m_.code[sc].c = end;
      patch_a(j, end);
      pop_if(discard);
      return;
    }
    if ((n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) && (is_null_literal(*n.lhs) || is_null_literal(*n.rhs))) {
      if (is_null_literal(*n.lhs) && is_null_literal(*n.rhs)) {
        emit(Op::PushNull);
      } else {
        expr(is_null_literal(*n.lhs) ? *n.rhs : *n.lhs);
      }
      emit(Op::EqNull, n.op == BinaryOp::Eq ? 1 : 0);
      pop_if(discard);
      return;
    }
    expr(*n.lhs);
    expr(*n.rhs);
    if (n.op == BinaryOp::Add && info(e).type.is_string())
      emit(Op::Concat);
    else
      emit(Op::Binary, static_cast<int>(n.op), type_index(info(e).type));
    pop_if(discard);
  }

  // Where an assignment stores.
  enum class Place { Local, Field, Static, Array };
  struct LValue {
    Place place;
    int slot = -1;
    int name = -1;
    int owner = -1;  // class name string for statics
    TypeRef type;
  };

  // Evaluates the location part (object / array+index) and describes it.
  LValue lvalue(const Expr& t) {
    const ExprInfo& i = info(t);
    LValue lv;
    lv.type = i.type;
    if (const auto* ne = t.as<NameExpr>()) {
      if (i.name == NameKind::Local) {
        lv.place = Place::Local;
        lv.slot = slot_of(i.local, t);
        return lv;
      }
      lv.name = cp_.intern(ne->name);
      if (i.name == NameKind::Field && !i.isStatic && !m_.isStatic) {
        emit(Op::Load, 0);
        lv.place = Place::Field;
        return lv;
      }
      lv.place = Place::Static;
      lv.owner = cp_.intern(i.name == NameKind::Field ? rp_.classes[f_cls(i.fieldClass, ne->name)].name : "?");
      return lv;
    }
    if (const auto* fa = t.as<FieldAccessExpr>()) {
      lv.name = cp_.intern(fa->name);
      if (is_type_target(*fa->target)) {
        lv.place = Place::Static;
        lv.owner = cp_.intern(i.name == NameKind::Field ? rp_.classes[f_cls(i.fieldClass, fa->name)].name
                                                        : info(*fa->target).typeName);
        return lv;
      }
      if (i.name == NameKind::Field && i.isStatic) {
        expr(*fa->target, true);
        lv.place = Place::Static;
        lv.owner = cp_.intern(rp_.classes[f_cls(i.fieldClass, fa->name)].name);
        return lv;
      }
      expr(*fa->target);
      lv.place = Place::Field;
      return lv;
    }
    if (const auto* aa = t.as<ArrayAccessExpr>()) {
      expr(*aa->array);
      expr(*aa->index);
      lv.place = Place::Array;
      return lv;
    }
    if (const auto* pe = t.as<ParenExpr>()) return lvalue(*pe->inner);
    throw std::runtime_error("line " + std::to_string(t.pos.line) + ": invalid assignment target");
  }

  void load_from(const LValue& lv) {
    switch (lv.place) {
      case Place::Local: emit(Op::Load, lv.slot); break;
      case Place::Field:
        emit(Op::Dup);
        emit(Op::GetField, lv.name, type_index(lv.type));
        break;
      case Place::Static: emit(Op::GetStatic, lv.name, lv.owner, type_index(lv.type)); break;
      case Place::Array:
        emit(Op::Dup2);
        emit(Op::ArrayLoad, 0, type_index(lv.type));
        break;
    }
  }

  // Keeps a copy of the value on top below the location operands.
  void keep_value(const LValue& lv) {
    switch (lv.place) {
      case Place::Local:
      case Place::Static: emit(Op::Dup); break;
      case Place::Field: emit(Op::DupX1); break;
      case Place::Array: emit(Op::DupX2); break;
    }
  }

  void store_to(const LValue& lv) {
    int t = type_index(lv.type);
    switch (lv.place) {
      case Place::Local: emit(Op::Store, lv.slot, t); break;
      case Place::Field: emit(Op::PutField, lv.name, t); break;
      case Place::Static: emit(Op::PutStatic, lv.name, lv.owner, t); break;
      case Place::Array: emit(Op::ArrayStore, 0, t); break;
    }
  }

  // Implicit narrowing after compound assignment / increment.
  void narrow(const TypeRef& target, const std::string& resultType) {
    if (target.is_numeric() && target.name != resultType) emit(Op::Cast, cp_.intern(target.name));
  }

  // Compound update: target op= value (value == nullptr means literal 1).
  void update(const Expr& target, BinaryOp op, const Expr* value, bool needValue, bool post) {
    LValue lv = lvalue(target);
    load_from(lv);
    if (needValue && post) keep_value(lv);
    std::string valueType = "int";
    if (value) {
      expr(*value);
      valueType = is_unknown(info(*value).type) ? "" : info(*value).type.str();
    } else {
      emit(Op::PushLit, literal({LiteralKind::Int, "1"}));
    }
    std::string result;
    if (op == BinaryOp::Add && (lv.type.is_string() || valueType == "String")) {
      emit(Op::Concat);
      result = "String";
    } else {
      if (lv.type.is_numeric() && !valueType.empty() && is_primitive_name(valueType))
        result = promote(lv.type.name, valueType);
      else if (lv.type.is_numeric())
        result = promote(lv.type.name, "int");
      emit(Op::Binary, static_cast<int>(op), result.empty() ? -1 : cp_.intern(result));
      narrow(lv.type, result);
    }
    if (needValue && !post) keep_value(lv);
    store_to(lv);
  }

  void expr_node(const Expr&, const AssignExpr& n, bool discard) {
    if (n.op != AssignOp::Assign) {
      update(*n.target, *compound_binary(n.op), &*n.value, !discard, false);
      return;
    }
    LValue lv = lvalue(*n.target);
    expr(*n.value);
    if (!discard) keep_value(lv);
    store_to(lv);
  }

  void expr_node(const Expr&, const ConditionalExpr& n, bool discard) {
    expr(*n.cond);
    int jf = emit(Op::JumpIfFalse);
    expr(*n.thenExpr, discard);
    int j = emit(Op::Jump);
    patch_a(jf, here());
    expr(*n.elseExpr, discard);
    patch_a(j, here());
  }

  void expr_node(const Expr&, const CastExpr& n, bool discard) {
    expr(*n.operand);
    emit(Op::Cast, cp_.intern(n.type.name));
    pop_if(discard);
  }

  void expr_node(const Expr&, const ParenExpr& n, bool discard) { expr(*n.inner, discard); }

  // Instance initialisers of class `cls` in declaration order.
  void instance_inits(int cls) {
    const ClassDecl& cd = rp_.decl(cls);
    for (const Member& m : cd.members) {
      if (const auto* f = m.as<FieldDecl>()) {
        if (f->mods.isStatic) continue;
        for (const VarDeclarator& v : f->vars) {
          line_ = v.pos.line;
          if (v.init) {
            emit(Op::Load, 0);
            expr(*v.init);
            emit(Op::PutField, cp_.intern(v.name), type_index(f->type));
          } else if (f->type.is_primitive()) {
            emit(Op::Load, 0);
            emit(Op::ZeroField, cp_.intern(v.name), cp_.intern(f->type.name));
          }
        }
      } else if (const auto* ib = m.as<InitializerDecl>()) {
        if (!ib->isStatic) stmt(ib->body);
      }
    }
  }

  void static_inits(int cls) {
    const ClassDecl& cd = rp_.decl(cls);
    int owner = cp_.intern(cd.name);
    for (const Member& m : cd.members) {
      if (const auto* f = m.as<FieldDecl>()) {
        if (!f->mods.isStatic) continue;
        for (const VarDeclarator& v : f->vars) {
          line_ = v.pos.line;
          if (v.init) {
            expr(*v.init);
            emit(Op::PutStatic, cp_.intern(v.name), owner, type_index(f->type));
          } else if (f->type.is_primitive()) {
            emit(Op::ZeroStatic, cp_.intern(v.name), owner, cp_.intern(f->type.name));
          }
        }
      } else if (const auto* ib = m.as<InitializerDecl>()) {
        if (ib->isStatic) stmt(ib->body);
      }
    }
  }

  // Superclass construction, then this class's initialisers.
  void ctor_prologue(int cls) {
    int super = rp_.classes[cls].super;
    if (super >= 0) {
      MethodRef sc = rp_.find_constructor(super, 0);
      int target = sc.member >= 0 ? cp_.byMember.at({sc.cls, sc.member}) : cp_.implicitCtor[super];
      emit(Op::Load, 0);
      emit(Op::Invoke, target, 0, kDiscard | kHasScope);
    }
    instance_inits(cls);
  }

 private:
  CompiledProgram& cp_;
  const ResolvedProgram& rp_;
  const Bindings& b_;
  CompiledMethod& m_;
  int cls_;
  int line_ = 0;
  std::unordered_map<NodeUid, int> slots_;
  std::vector<Target> targets_;
};

}  // namespace

CompiledProgram compile_program(const ResolvedProgram& rp) {
  CompiledProgram cp;
  cp.program = &rp;
  // Reserve method indices: declared methods/constructors, then per-class
  // implicit constructors and static initialisers.
  for (std::size_t c = 0; c < rp.classes.size(); ++c) {
    const ClassDecl& cd = rp.decl(static_cast<int>(c));
    for (std::size_t m = 0; m < cd.members.size(); ++m) {
      const Member& mem = cd.members[m];
      CompiledMethod cm;
      cm.cls = static_cast<int>(c);
      cm.member = static_cast<int>(m);
      if (const auto* md = mem.as<MethodDecl>()) {
        cm.isStatic = md->mods.isStatic;
        cm.returnsValue = md->returnType.has_value();
        cm.name = md->name;
      } else if (mem.as<ConstructorDecl>()) {
        cm.name = "<init>";
      } else {
        continue;
      }
      cm.signature = rp.signature({cm.cls, cm.member});
      cp.byMember[{cm.cls, cm.member}] = static_cast<int>(cp.methods.size());
      cp.methods.push_back(std::move(cm));
    }
  }
  for (std::size_t c = 0; c < rp.classes.size(); ++c) {
    CompiledMethod ctor;
    ctor.cls = static_cast<int>(c);
    ctor.signature = rp.classes[c].name + ".<init>()";
    cp.implicitCtor.push_back(static_cast<int>(cp.methods.size()));
    cp.methods.push_back(std::move(ctor));
    CompiledMethod clinit;
    clinit.cls = static_cast<int>(c);
    clinit.isStatic = true;
    clinit.signature = rp.classes[c].name + ".<clinit>()";
    cp.staticInit.push_back(static_cast<int>(cp.methods.size()));
    cp.methods.push_back(std::move(clinit));
  }

  for (std::size_t mi = 0; mi < cp.methods.size(); ++mi) {
    CompiledMethod& cm = cp.methods[mi];
    int cls = cm.cls;
    MethodCompiler mc(cp, rp, cm, cls);
    if (cm.member < 0) {
      bool isClinit = cp.staticInit[cls] == static_cast<int>(mi);
      if (isClinit) {
        mc.static_inits(cls);
      } else {
        mc.add_this();
        cm.params = 1;
        mc.ctor_prologue(cls);
      }
      mc.finish();
      continue;
    }
    const Member& mem = rp.decl(cls).members[cm.member];
    if (const auto* md = mem.as<MethodDecl>()) {
      if (!md->mods.isStatic) mc.add_this();
      for (const Param& p : md->params) {
        mc.add_param(p.uid);
        cm.paramTypes.push_back(mc.type_index(p.type));
      }
      cm.params = cm.slots;
      if (md->returnType) cm.returnType = mc.type_index(*md->returnType);
      mc.stmt(md->body);
    } else {
      const auto& cd = std::get<ConstructorDecl>(mem.node);
      mc.add_this();
      for (const Param& p : cd.params) {
        mc.add_param(p.uid);
        cm.paramTypes.push_back(mc.type_index(p.type));
      }
      cm.params = cm.slots;
      mc.ctor_prologue(cls);
      mc.stmt(cd.body);
    }
    mc.finish();
  }
  return cp;
}

std::string disassemble(const CompiledProgram& cp, int method) {
  static const char* kNames[] = {
      "PushLit",    "PushNull",     "Load",      "Store",     "GetField",    "PutField",   "GetStatic",
      "PutStatic",  "ArrayLoad",    "ArrayStore", "ArrayLength", "Binary",    "Unary",      "Concat",
      "Cast",       "Refine",       "Invoke",    "InvokeVirtual", "InvokeApi", "NewObject", "NewApiObject",
      "NewArray",   "NewArrayInit", "Jump",      "JumpIfFalse", "JumpIfTrue", "Short",     "LoopEnter",
      "LoopCheck",  "Dup",          "Dup2",      "DupX1",     "DupX2",       "Pop",        "Return",
      "EqNull",     "ZeroField",    "ZeroStatic", "TypeName",
  };
  const CompiledMethod& m = cp.methods[method];
  std::ostringstream os;
  os << m.signature << " slots=" << m.slots << " params=" << m.params << "\n";
  for (std::size_t i = 0; i < m.code.size(); ++i) {
    const Instr& in = m.code[i];
    os << "  " << i << ": " << kNames[static_cast<int>(in.op)] << " " << in.a << " " << in.b << " " << in.c << "\n";
  }
  return os.str();
}

}  // namespace bsim::executor
