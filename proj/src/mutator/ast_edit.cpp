#include "bsim/mutator/ast_edit.hpp"

#include <cctype>

#include "bsim/frontend/lexer.hpp"

namespace bsim::mutator {

using namespace frontend;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

using ExprFn = std::function<void(Expr&, const ExprCtx&)>;
using StmtFn = std::function<void(Stmt&, const StmtCtx&)>;

class Walker {
 public:
  Walker(const ExprFn* ef, const StmtFn* sf) : ef_(ef), sf_(sf) {}

  void units(std::vector<Ast>& us) {
    for (std::size_t u = 0; u < us.size(); ++u) {
      auto& classes = us[u].classes;
      for (std::size_t c = 0; c < classes.size(); ++c) {
        auto& members = classes[c].members;
        for (std::size_t m = 0; m < members.size(); ++m) {
          where_ = Where{static_cast<int>(u), static_cast<int>(c), static_cast<int>(m), false};
          member(members[m]);
        }
      }
    }
  }

  void member(Member& m) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FieldDecl>) {
            where_.staticCtx = n.mods.isStatic;
            for (auto& v : n.vars)
              if (v.init) {
                ExprCtx c = base();
                c.fieldInit = true;
                expr(*v.init, c);
              }
          } else if constexpr (std::is_same_v<T, MethodDecl>) {
            where_.staticCtx = n.mods.isStatic;
            top(n.body);
          } else if constexpr (std::is_same_v<T, ConstructorDecl>) {
            where_.staticCtx = false;
            top(n.body);
          } else {
            where_.staticCtx = n.isStatic;
            top(n.body);
          }
        },
        m.node);
  }

  void top(Stmt& s) {
    StmtCtx c;
    c.where = where_;
    stmt(s, c);
  }

  ExprCtx base() const {
    ExprCtx c;
    c.where = where_;
    return c;
  }

  void list(std::vector<Stmt>& v, const StmtCtx& parent, bool inBlock) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      StmtCtx c = parent;
      c.list = &v;
      c.index = i;
      c.inBlock = inBlock;
      stmt(v[i], c);
    }
  }

  void child(Stmt& s, const StmtCtx& parent, int loop, int brk) {
    StmtCtx c = parent;
    c.list = nullptr;
    c.index = 0;
    c.inBlock = false;
    c.loopDepth += loop;
    c.breakDepth += brk;
    stmt(s, c);
  }

  void stmt(Stmt& s, const StmtCtx& c) {
    if (sf_) (*sf_)(s, c);
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BlockStmt>) {
            list(n.stmts, c, true);
          } else if constexpr (std::is_same_v<T, LocalVarStmt>) {
            for (auto& v : n.vars)
              if (v.init) ex(*v.init);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            ExprCtx e = base();
            e.stmtTop = true;
            expr(n.expr, e);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            ex(n.cond);
            child(*n.thenStmt, c, 0, 0);
            if (n.elseStmt) child(**n.elseStmt, c, 0, 0);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            ex(n.cond);
            child(*n.body, c, 1, 1);
          } else if constexpr (std::is_same_v<T, DoWhileStmt>) {
            child(*n.body, c, 1, 1);
            ex(n.cond);
          } else if constexpr (std::is_same_v<T, ForStmt>) {
            StmtCtx ic = c;
            list(n.init, ic, false);
            if (n.cond) ex(*n.cond);
            for (auto& u : n.update) {
              ExprCtx e = base();
              e.stmtTop = true;
              expr(u, e);
            }
            child(*n.body, c, 1, 1);
          } else if constexpr (std::is_same_v<T, ForEachStmt>) {
            ex(n.iterable);
            child(*n.body, c, 1, 1);
          } else if constexpr (std::is_same_v<T, SwitchStmt>) {
            ex(n.selector);
            for (auto& k : n.cases) {
              if (k.label) {
                ExprCtx e = base();
                e.caseLabel = true;
                expr(*k.label, e);
              }
              StmtCtx bc = c;
              bc.breakDepth += 1;
              list(k.body, bc, false);
            }
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (n.value) ex(*n.value);
          }
        },
        s.node);
  }

  void ex(Expr& e) { expr(e, base()); }

  void expr(Expr& e, const ExprCtx& c) {
    if (ef_) (*ef_)(e, c);
    auto sub = [&](Expr& x) {
      ExprCtx k = base();
      k.fieldInit = c.fieldInit;
      k.parent = &e;
      return std::make_pair(&x, k);
    };
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FieldAccessExpr>) {
            auto [x, k] = sub(*n.target);
            k.receiver = true;
            expr(*x, k);
          } else if constexpr (std::is_same_v<T, ArrayAccessExpr>) {
            auto [a, ka] = sub(*n.array);
            expr(*a, ka);
            auto [i, ki] = sub(*n.index);
            expr(*i, ki);
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            if (n.target) {
              auto [x, k] = sub(**n.target);
              k.receiver = true;
              expr(*x, k);
            }
            for (auto& a : n.args) {
              auto [x, k] = sub(a);
              expr(*x, k);
            }
          } else if constexpr (std::is_same_v<T, NewObjectExpr>) {
            for (auto& a : n.args) {
              auto [x, k] = sub(a);
              expr(*x, k);
            }
          } else if constexpr (std::is_same_v<T, NewArrayExpr>) {
            if (n.size) {
              auto [x, k] = sub(**n.size);
              expr(*x, k);
            }
            if (n.init)
              for (auto& a : n.init->elements) {
                auto [x, k] = sub(a);
                expr(*x, k);
              }
          } else if constexpr (std::is_same_v<T, ArrayInitExpr>) {
            for (auto& a : n.elements) {
              auto [x, k] = sub(a);
              expr(*x, k);
            }
          } else if constexpr (std::is_same_v<T, UnaryExpr>) {
            auto [x, k] = sub(*n.operand);
            k.lvalue = n.op == UnaryOp::PreInc || n.op == UnaryOp::PreDec || n.op == UnaryOp::PostInc ||
                       n.op == UnaryOp::PostDec;
            k.negated = n.op == UnaryOp::Minus;
            expr(*x, k);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            auto [l, kl] = sub(*n.lhs);
            expr(*l, kl);
            auto [r, kr] = sub(*n.rhs);
            expr(*r, kr);
          } else if constexpr (std::is_same_v<T, AssignExpr>) {
            auto [t, kt] = sub(*n.target);
            kt.lvalue = true;
            expr(*t, kt);
            auto [v, kv] = sub(*n.value);
            expr(*v, kv);
          } else if constexpr (std::is_same_v<T, ConditionalExpr>) {
            for (Expr* x : {&*n.cond, &*n.thenExpr, &*n.elseExpr}) {
              auto [y, k] = sub(*x);
              expr(*y, k);
            }
          } else if constexpr (std::is_same_v<T, CastExpr>) {
            auto [x, k] = sub(*n.operand);
            expr(*x, k);
          } else if constexpr (std::is_same_v<T, ParenExpr>) {
            auto [x, k] = sub(*n.inner);
            expr(*x, k);
          }
        },
        e.node);
  }

 private:
  const ExprFn* ef_;
  const StmtFn* sf_;
  Where where_;
};

}  // namespace

void walk_exprs(std::vector<Ast>& units, const ExprFn& fn) { Walker(&fn, nullptr).units(units); }

void walk_stmts(std::vector<Ast>& units, const StmtFn& fn) { Walker(nullptr, &fn).units(units); }

void walk_exprs_in(Stmt& s, const ExprFn& fn) { Walker(&fn, nullptr).top(s); }

void walk_exprs_in(Expr& e, const ExprFn& fn) { Walker(&fn, nullptr).ex(e); }

void walk_stmts_in(Stmt& s, const StmtFn& fn) { Walker(nullptr, &fn).top(s); }

void refresh_uids(Stmt& s) {
  walk_stmts_in(s, [](Stmt& x, const StmtCtx&) {
    x.uid = next_uid();
    if (auto* lv = x.as<LocalVarStmt>())
      for (auto& v : lv->vars) v.uid = next_uid();
  });
  walk_exprs_in(s, [](Expr& x, const ExprCtx&) { x.uid = next_uid(); });
}

void refresh_uids(Expr& e) {
  walk_exprs_in(e, [](Expr& x, const ExprCtx&) { x.uid = next_uid(); });
}

std::set<std::string> collect_identifiers(const std::vector<Ast>& units) {
  std::set<std::string> out;
  auto type = [&](const TypeRef& t) {
    out.insert(t.name);
    for (const auto& q : t.qualifier) out.insert(q);
  };
  auto& mut = const_cast<std::vector<Ast>&>(units);  // walkers only read here
  for (const Ast& a : units) {
    if (a.package)
      for (const auto& s : a.package->segments) out.insert(s);
    for (const ClassDecl& c : a.classes) {
      out.insert(c.name);
      if (c.superclass) type(*c.superclass);
      for (const Member& m : c.members) {
        std::visit(
            [&](const auto& n) {
              using T = std::decay_t<decltype(n)>;
              if constexpr (std::is_same_v<T, FieldDecl>) {
                type(n.type);
                for (const auto& v : n.vars) out.insert(v.name);
              } else if constexpr (std::is_same_v<T, MethodDecl>) {
                out.insert(n.name);
                if (n.returnType) type(*n.returnType);
                for (const auto& p : n.params) {
                  out.insert(p.name);
                  type(p.type);
                }
              } else if constexpr (std::is_same_v<T, ConstructorDecl>) {
                for (const auto& p : n.params) {
                  out.insert(p.name);
                  type(p.type);
                }
              }
            },
            m.node);
      }
    }
  }
  walk_stmts(mut, [&](Stmt& s, const StmtCtx&) {
    if (auto* lv = s.as<LocalVarStmt>()) {
      type(lv->type);
      for (const auto& v : lv->vars) out.insert(v.name);
    } else if (auto* fe = s.as<ForEachStmt>()) {
      type(fe->type);
      out.insert(fe->var);
    }
  });
  walk_exprs(mut, [&](Expr& e, const ExprCtx&) {
    if (auto* n = e.as<NameExpr>()) out.insert(n->name);
    if (auto* f = e.as<FieldAccessExpr>()) out.insert(f->name);
    if (auto* c = e.as<CallExpr>()) out.insert(c->name);
    if (auto* o = e.as<NewObjectExpr>()) type(o->type);
    if (auto* a = e.as<NewArrayExpr>()) type(a->elementType);
    if (auto* k = e.as<CastExpr>()) type(k->type);
  });
  return out;
}

namespace {

const char* const kWords[] = {"value", "count",  "item",   "data",  "temp",   "node",  "total", "index",
                              "result", "buffer", "entry", "record", "flag",  "score", "level", "state",
                              "amount", "input",  "output", "cursor", "marker", "slot",  "token", "unit",
                              "holder", "target", "source", "limit",  "offset", "step",  "part",  "field"};

}  // namespace

std::string NameGen::fresh(Rng& rng, bool capital, const std::string& hint) {
  for (;;) {
    std::string a = kWords[rng.below(std::size(kWords))];
    std::string b = kWords[rng.below(std::size(kWords))];
    std::string name = hint.empty() ? a : hint;
    b[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(b[0])));
    name += b;
    if (capital) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (rng.below(2)) name += std::to_string(rng.below(100));
    if (taken_.count(name) || is_keyword(name)) continue;
    taken_.insert(name);
    return name;
  }
}

std::string NameGen::fresh_constant(Rng& rng) {
  for (;;) {
    std::string a = kWords[rng.below(std::size(kWords))];
    std::string b = kWords[rng.below(std::size(kWords))];
    std::string name = a + "_" + b;
    for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (rng.below(2)) name += "_" + std::to_string(rng.below(100));
    if (taken_.count(name)) continue;
    taken_.insert(name);
    return name;
  }
}

Expr name_expr(const std::string& name) { return make_expr(NameExpr{name}); }

Expr int_literal(long long v) {
  Literal l;
  l.kind = LiteralKind::Int;
  l.spelling = std::to_string(v);
  return make_expr(LiteralExpr{l});
}

Stmt expr_stmt(Expr e) { return make_stmt(ExprStmt{std::move(e)}); }

Stmt block(std::vector<Stmt> stmts) { return make_stmt(BlockStmt{std::move(stmts)}); }

const Expr& unparen(const Expr& e) {
  if (const auto* p = e.as<ParenExpr>()) return unparen(*p->inner);
  return e;
}

bool contains_expr(Stmt& s, const std::function<bool(const Expr&)>& pred) {
  bool found = false;
  walk_exprs_in(s, [&](Expr& e, const ExprCtx&) {
    if (!found && pred(e)) found = true;
  });
  return found;
}

bool contains_stmt(Stmt& s, const std::function<bool(const Stmt&, const StmtCtx&)>& pred) {
  bool found = false;
  walk_stmts_in(s, [&](Stmt& x, const StmtCtx& c) {
    if (!found && pred(x, c)) found = true;
  });
  return found;
}

}  // namespace bsim::mutator
