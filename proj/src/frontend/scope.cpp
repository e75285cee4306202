#include "bsim/frontend/scope.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "bsim/frontend/resolver.hpp"

namespace bsim::frontend {

const ExprInfo& Bindings::at(NodeUid uid) const {
  static const ExprInfo kNone{};
  auto it = exprs.find(uid);
  return it == exprs.end() ? kNone : it->second;
}

bool is_unknown(const TypeRef& t) { return t.name.empty(); }

TypeRef unknown_type() { return TypeRef{}; }

TypeRef simple_type(const std::string& name, bool array) {
  TypeRef t;
  t.name = name;
  t.array = array;
  return t;
}

std::string promote(const std::string& a, const std::string& b) {
  auto rank = [](const std::string& t) {
    if (t == "double") return 4;
    if (t == "float") return 3;
    if (t == "long") return 2;
    return 1;
  };
  int r = std::max(rank(a), rank(b));
  switch (r) {
    case 4: return "double";
    case 3: return "float";
    case 2: return "long";
    default: return "int";
  }
}

namespace {

class Analyzer {
 public:
  Analyzer(const ResolvedProgram& p, std::vector<std::string>& warnings, std::vector<std::string>& boundary)
      : p_(p), warnings_(warnings), boundary_(boundary) {}

  Bindings run() {
    for (std::size_t c = 0; c < p_.classes.size(); ++c) {
      cls_ = static_cast<int>(c);
      const ClassDecl& cd = p_.decl(cls_);
      path_ = p_.units[p_.classes[c].unit].path;
      if (cd.superclass) note_type(*cd.superclass);
      for (const Member& m : cd.members) member(m);
    }
    return std::move(b_);
  }

 private:
  struct Scope {
    std::vector<std::pair<std::string, NodeUid>> names;
  };

  void note_type(const TypeRef& t) {
    if (t.name.empty() || is_primitive_name(t.name) || t.name == "String") return;
    if (!p_.is_declared(t.name) && std::find(boundary_.begin(), boundary_.end(), t.name) == boundary_.end())
      boundary_.push_back(t.name);
  }

  void declare(const std::string& name, const TypeRef& type, NodeUid uid) {
    note_type(type);
    scopes_.back().names.emplace_back(name, uid);
    b_.locals[uid] = LocalInfo{name, type, owner_};
  }

  NodeUid lookup_local(const std::string& name) const {
    for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s)
      for (auto n = s->names.rbegin(); n != s->names.rend(); ++n)
        if (n->first == name) return n->second;
    return 0;
  }

  void push() { scopes_.emplace_back(); }
  void pop() { scopes_.pop_back(); }

  void member(const Member& m) {
    owner_ = m.uid;
    scopes_.clear();
    push();
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FieldDecl>) {
            note_type(n.type);
            staticCtx_ = n.mods.isStatic;
            for (const VarDeclarator& v : n.vars)
              if (v.init) expr(*v.init, &n.type);
          } else if constexpr (std::is_same_v<T, MethodDecl>) {
            staticCtx_ = n.mods.isStatic;
            if (n.returnType) note_type(*n.returnType);
            for (const Param& pa : n.params) declare(pa.name, pa.type, pa.uid);
            stmt(n.body);
          } else if constexpr (std::is_same_v<T, ConstructorDecl>) {
            staticCtx_ = false;
            for (const Param& pa : n.params) declare(pa.name, pa.type, pa.uid);
            stmt(n.body);
          } else {
            staticCtx_ = n.isStatic;
            stmt(n.body);
          }
        },
        m.node);
    pop();
  }

  void stmt(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BlockStmt>) {
            push();
            for (const Stmt& x : n.stmts) stmt(x);
            pop();
          } else if constexpr (std::is_same_v<T, LocalVarStmt>) {
            for (const VarDeclarator& v : n.vars) {
              if (v.init) expr(*v.init, &n.type);
              declare(v.name, n.type, v.uid);
            }
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.expr);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            expr(n.cond);
            scoped(*n.thenStmt);
            if (n.elseStmt) scoped(**n.elseStmt);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            expr(n.cond);
            scoped(*n.body);
          } else if constexpr (std::is_same_v<T, DoWhileStmt>) {
            scoped(*n.body);
            expr(n.cond);
          } else if constexpr (std::is_same_v<T, ForStmt>) {
            push();
            for (const Stmt& i : n.init) stmt(i);
            if (n.cond) expr(*n.cond);
            for (const Expr& u : n.update) expr(u);
            scoped(*n.body);
            pop();
          } else if constexpr (std::is_same_v<T, ForEachStmt>) {
            expr(n.iterable);
            push();
            declare(n.var, n.type, s.uid);
            scoped(*n.body);
            pop();
          } else if constexpr (std::is_same_v<T, SwitchStmt>) {
            expr(n.selector);
            push();
            for (const SwitchCase& c : n.cases) {
              if (c.label) expr(*c.label);
              for (const Stmt& x : c.body) stmt(x);
            }
            pop();
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (n.value) expr(*n.value);
          }
        },
        s.node);
  }

  void scoped(const Stmt& s) {
    push();
    stmt(s);
    pop();
  }

  ExprInfo& info(const Expr& e) { return b_.exprs[e.uid]; }

  // Field lookup on declared class `cls`; fills `i` and returns true when found.
  bool field_of(int cls, const std::string& name, ExprInfo& i) {
    auto [fc, fi] = p_.find_field(cls, name);
    if (fc < 0) return false;
    const FieldInfo& f = p_.classes[fc].fields[fi];
    i.name = NameKind::Field;
    i.fieldClass = fc;
    i.isStatic = f.mods.isStatic;
    i.type = f.type;
    return true;
  }

  TypeRef expr(const Expr& e, const TypeRef* expected = nullptr) {
    TypeRef t = expr_inner(e, expected);
    ExprInfo& i = info(e);
    i.type = t;
    return t;
  }

  TypeRef expr_inner(const Expr& e, const TypeRef* expected) {
    return std::visit(
        [&](const auto& n) -> TypeRef {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LiteralExpr>) {
            switch (n.value.kind) {
              case LiteralKind::Int: return simple_type("int");
              case LiteralKind::Long: return simple_type("long");
              case LiteralKind::Float: return simple_type("float");
              case LiteralKind::Double: return simple_type("double");
              case LiteralKind::Char: return simple_type("char");
              case LiteralKind::String: return simple_type("String");
              case LiteralKind::Boolean: return simple_type("boolean");
              case LiteralKind::Null: return unknown_type();
            }
            return unknown_type();
          } else if constexpr (std::is_same_v<T, NameExpr>) {
            ExprInfo& i = info(e);
            if (NodeUid l = lookup_local(n.name)) {
              i.name = NameKind::Local;
              i.local = l;
              return b_.locals[l].type;
            }
            if (field_of(cls_, n.name, i)) return i.type;
            i.name = NameKind::Type;
            i.typeName = n.name;
            if (!p_.is_declared(n.name) && !std::isupper(static_cast<unsigned char>(n.name[0])))
              warnings_.push_back(path_ + ":" + std::to_string(e.pos.line) + ": unresolved name '" + n.name +
                                  "' treated as a type");
            note_type(simple_type(n.name));
            return unknown_type();
          } else if constexpr (std::is_same_v<T, ThisExpr>) {
            return simple_type(p_.classes[cls_].name);
          } else if constexpr (std::is_same_v<T, FieldAccessExpr>) {
            TypeRef tt = expr(*n.target);
            const ExprInfo& ti = info(*n.target);
            ExprInfo& i = info(e);
            int owner = -1;
            if (ti.name == NameKind::Type) {
              owner = p_.find_class(ti.typeName);
            } else if (!is_unknown(tt) && !tt.array) {
              owner = p_.find_class(tt.name);
            }
            if (owner >= 0 && field_of(owner, n.name, i)) return i.type;
            if (tt.array && n.name == "length") return simple_type("int");
            return unknown_type();
          } else if constexpr (std::is_same_v<T, ArrayAccessExpr>) {
            TypeRef at = expr(*n.array);
            expr(*n.index);
            if (at.array) return at.element();
            return unknown_type();
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            return call(e, n);
          } else if constexpr (std::is_same_v<T, NewObjectExpr>) {
            note_type(n.type);
            for (const Expr& a : n.args) expr(a);
            TypeRef t = n.type;
            t.qualifier.clear();
            return t;
          } else if constexpr (std::is_same_v<T, NewArrayExpr>) {
            note_type(n.elementType);
            if (n.size) expr(**n.size);
            TypeRef elem = n.elementType;
            elem.qualifier.clear();
            if (n.init)
              for (const Expr& x : n.init->elements) expr(x, &elem);
            elem.array = true;
            return elem;
          } else if constexpr (std::is_same_v<T, ArrayInitExpr>) {
            TypeRef elem = expected && expected->array ? expected->element() : unknown_type();
            for (const Expr& x : n.elements) expr(x, &elem);
            if (expected) return *expected;
            return unknown_type();
          } else if constexpr (std::is_same_v<T, UnaryExpr>) {
            TypeRef ot = expr(*n.operand);
            if (n.op == UnaryOp::Not) return simple_type("boolean");
            if (n.op == UnaryOp::Plus || n.op == UnaryOp::Minus)
              return ot.is_numeric() ? simple_type(promote(ot.name, "int")) : ot;
            return ot;
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            TypeRef l = expr(*n.lhs);
            TypeRef r = expr(*n.rhs);
            switch (n.op) {
              case BinaryOp::Add:
                if (l.is_string() || r.is_string()) return simple_type("String");
                [[fallthrough]];
              case BinaryOp::Sub:
              case BinaryOp::Mul:
              case BinaryOp::Div:
              case BinaryOp::Mod:
                if (l.is_numeric() && r.is_numeric()) return simple_type(promote(l.name, r.name));
                if (l.is_numeric() && is_unknown(r)) return simple_type(promote(l.name, "int"));
                if (r.is_numeric() && is_unknown(l)) return simple_type(promote(r.name, "int"));
                return unknown_type();
              default:
                return simple_type("boolean");
            }
          } else if constexpr (std::is_same_v<T, AssignExpr>) {
            TypeRef t = expr(*n.target);
            expr(*n.value, &t);
            return t;
          } else if constexpr (std::is_same_v<T, ConditionalExpr>) {
            expr(*n.cond);
            TypeRef a = expr(*n.thenExpr, expected);
            TypeRef b = expr(*n.elseExpr, expected);
            if (a.is_numeric() && b.is_numeric() && a.name != b.name) return simple_type(promote(a.name, b.name));
            return is_unknown(a) ? b : a;
          } else if constexpr (std::is_same_v<T, CastExpr>) {
            expr(*n.operand);
            return n.type;
          } else {
            return expr(*n.inner, expected);
          }
        },
        e.node);
  }

  TypeRef call(const Expr& e, const CallExpr& c) {
    int owner = -1;
    bool staticRecv = false;
    std::string apiType = "?";
    if (!c.target) {
      owner = cls_;
    } else {
      TypeRef tt = expr(**c.target);
      const ExprInfo& ti = info(**c.target);
      if (ti.name == NameKind::Type) {
        owner = p_.find_class(ti.typeName);
        staticRecv = true;
        apiType = ti.typeName;
      } else if (!is_unknown(tt)) {
        apiType = tt.str();
        if (!tt.array) owner = p_.find_class(tt.name);
      }
    }
    for (const Expr& a : c.args) expr(a);
    ExprInfo& i = info(e);
    if (owner >= 0) {
      MethodRef m = p_.find_method(owner, c.name, c.args.size());
      if (m.member >= 0) {
        const MethodDecl& md = p_.method(m);
        i.call = CallKind::Declared;
        i.callClass = m.cls;
        i.callMember = m.member;
        i.isStatic = md.mods.isStatic;
        (void)staticRecv;
        return md.returnType ? *md.returnType : simple_type("void");
      }
      if (!c.target) {
        warnings_.push_back(path_ + ":" + std::to_string(e.pos.line) + ": call to undeclared method '" + c.name +
                            "' is stubbed");
        i.call = CallKind::Api;
        i.apiType = p_.classes[owner].name;
        return unknown_type();
      }
      // Declared receiver without that method: inherited from the root type.
      i.call = CallKind::Api;
      i.apiType = "Object";
      return unknown_type();
    }
    i.call = CallKind::Api;
    i.apiType = apiType;
    return unknown_type();
  }

  const ResolvedProgram& p_;
  std::vector<std::string>& warnings_;
  std::vector<std::string>& boundary_;
  Bindings b_;
  std::vector<Scope> scopes_;
  int cls_ = -1;
  NodeUid owner_ = 0;
  bool staticCtx_ = false;
  std::string path_;
};

}  // namespace

Bindings analyze_scopes(const ResolvedProgram& program, std::vector<std::string>& warnings,
                        std::vector<std::string>& boundary) {
  return Analyzer(program, warnings, boundary).run();
}

}  // namespace bsim::frontend
