#include "bsim/mutator/transformations.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace bsim::mutator {

using namespace frontend;
using Program = ResolvedProgram;

namespace {

enum Kind {
  kReformat,
  kRename,
  kQualify,
  kStaticField,
  kStaticCall,
  kAccess,
  kFieldInit,
  kRedundantConst,
  kSynchronized,
  kDefaultValue,
  kHoistDecl,
  kRearrange,
  kExtract,
  kCompound,
  kIncDec,
  kForWhile,
  kSwitchIf,
  kLiteralConst,
  kBrackets,
  kCount,
};

std::vector<Ast>& units_of(const Program& p) { return const_cast<std::vector<Ast>&>(p.units); }

std::string loc(const Program& p, int unit, SourcePos pos) {
  std::string path = unit >= 0 && unit < static_cast<int>(p.units.size()) ? p.units[unit].path : "?";
  return path + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

const ExprInfo* info(const Program& p, const Expr& e) {
  auto it = p.bindings.exprs.find(e.uid);
  return it == p.bindings.exprs.end() ? nullptr : &it->second;
}

int class_index(const Program& p, int unit, int cls) {
  for (std::size_t i = 0; i < p.classes.size(); ++i)
    if (p.classes[i].unit == unit && p.classes[i].index == cls) return static_cast<int>(i);
  return -1;
}

int class_index(const Program& p, const Where& w) { return class_index(p, w.unit, w.cls); }

ClassDecl& class_at(Program& p, const Where& w) { return p.units[w.unit].classes[w.cls]; }
Member& member_at(Program& p, const Where& w) { return class_at(p, w).members[w.member]; }
const Member& member_at(const Program& p, const Where& w) {
  return p.units[w.unit].classes[w.cls].members[w.member];
}

bool is_body_member(const Member& m) { return m.as<MethodDecl>() || m.as<ConstructorDecl>(); }

Stmt* member_body(Member& m) {
  if (auto* md = m.as<MethodDecl>()) return &md->body;
  if (auto* cd = m.as<ConstructorDecl>()) return &cd->body;
  if (auto* ib = m.as<InitializerDecl>()) return &ib->body;
  return nullptr;
}

std::vector<Param>* member_params(Member& m) {
  if (auto* md = m.as<MethodDecl>()) return &md->params;
  if (auto* cd = m.as<ConstructorDecl>()) return &cd->params;
  return nullptr;
}

bool is_entry(const Program& p, int cls, int member) {
  return std::find(p.entryPoints.begin(), p.entryPoints.end(), MethodRef{cls, member}) != p.entryPoints.end();
}

Expr* find_expr(Program& p, NodeUid uid, ExprCtx* ctx = nullptr) {
  Expr* hit = nullptr;
  walk_exprs(p.units, [&](Expr& e, const ExprCtx& c) {
    if (!hit && e.uid == uid) {
      hit = &e;
      if (ctx) *ctx = c;
    }
  });
  return hit;
}

Stmt* find_stmt(Program& p, NodeUid uid, StmtCtx* ctx = nullptr) {
  Stmt* hit = nullptr;
  walk_stmts(p.units, [&](Stmt& s, const StmtCtx& c) {
    if (!hit && s.uid == uid) {
      hit = &s;
      if (ctx) *ctx = c;
    }
  });
  return hit;
}

// Member holding `uid`; fills `w` (staticCtx left false).
Member* find_member(Program& p, NodeUid uid, Where* w = nullptr) {
  for (std::size_t u = 0; u < p.units.size(); ++u)
    for (std::size_t c = 0; c < p.units[u].classes.size(); ++c) {
      auto& ms = p.units[u].classes[c].members;
      for (std::size_t m = 0; m < ms.size(); ++m)
        if (ms[m].uid == uid) {
          if (w) *w = Where{static_cast<int>(u), static_cast<int>(c), static_cast<int>(m), false};
          return &ms[m];
        }
    }
  return nullptr;
}

ClassDecl* find_class_decl(Program& p, NodeUid uid) {
  for (auto& a : p.units)
    for (auto& c : a.classes)
      if (c.uid == uid) return &c;
  return nullptr;
}

struct FieldVar {
  FieldDecl* decl = nullptr;
  VarDeclarator* var = nullptr;
  Where where;
  std::size_t index = 0;
};

FieldVar find_field_var(Program& p, NodeUid uid) {
  for (std::size_t u = 0; u < p.units.size(); ++u)
    for (std::size_t c = 0; c < p.units[u].classes.size(); ++c) {
      auto& ms = p.units[u].classes[c].members;
      for (std::size_t m = 0; m < ms.size(); ++m)
        if (auto* fd = ms[m].as<FieldDecl>())
          for (std::size_t v = 0; v < fd->vars.size(); ++v)
            if (fd->vars[v].uid == uid)
              return {fd, &fd->vars[v], Where{static_cast<int>(u), static_cast<int>(c), static_cast<int>(m), false}, v};
    }
  return {};
}

// Every type reference with its owner uid and slot.
void for_each_typeref(std::vector<Ast>& units, const std::function<void(TypeRef&, NodeUid, int, int)>& fn) {
  for (std::size_t u = 0; u < units.size(); ++u) {
    int ui = static_cast<int>(u);
    for (auto& c : units[u].classes) {
      if (c.superclass) fn(*c.superclass, c.uid, 0, ui);
      for (auto& m : c.members) {
        if (auto* fd = m.as<FieldDecl>()) fn(fd->type, m.uid, 0, ui);
        if (auto* md = m.as<MethodDecl>())
          if (md->returnType) fn(*md->returnType, m.uid, 0, ui);
        if (auto* ps = member_params(m))
          for (std::size_t i = 0; i < ps->size(); ++i) fn((*ps)[i].type, m.uid, static_cast<int>(i) + 1, ui);
      }
    }
  }
  walk_stmts(units, [&](Stmt& s, const StmtCtx& c) {
    if (auto* lv = s.as<LocalVarStmt>()) fn(lv->type, s.uid, 0, c.where.unit);
    if (auto* fe = s.as<ForEachStmt>()) fn(fe->type, s.uid, 0, c.where.unit);
  });
  walk_exprs(units, [&](Expr& e, const ExprCtx& c) {
    if (auto* no = e.as<NewObjectExpr>()) fn(no->type, e.uid, 0, c.where.unit);
    if (auto* na = e.as<NewArrayExpr>()) fn(na->elementType, e.uid, 0, c.where.unit);
  });
}

// Local names declared in each member, keyed by member uid.
std::map<NodeUid, std::set<std::string>> member_locals(const Program& p) {
  std::map<NodeUid, std::set<std::string>> out;
  for (const auto& [uid, l] : p.bindings.locals) out[l.owner].insert(l.name);
  return out;
}

bool has_local(const std::map<NodeUid, std::set<std::string>>& locals, NodeUid member, const std::string& name) {
  auto it = locals.find(member);
  return it != locals.end() && it->second.count(name);
}

Expr boxed_assign(Expr target, Expr value, SourcePos pos = {}) {
  return make_expr(AssignExpr{AssignOp::Assign, ExprBox(std::move(target)), ExprBox(std::move(value))}, pos);
}

// `{...}` initializers are only legal in declarations.
Expr as_array_creation(Expr init, const TypeRef& declared) {
  auto* ai = init.as<ArrayInitExpr>();
  if (!ai) return init;
  NewArrayExpr na;
  na.elementType = declared.element();
  na.init = std::move(*ai);
  return make_expr(std::move(na), init.pos);
}

Literal zero_literal(const std::string& type) {
  if (type == "boolean") return {LiteralKind::Boolean, "false"};
  if (type == "long") return {LiteralKind::Long, "0L"};
  if (type == "float") return {LiteralKind::Float, "0.0f"};
  if (type == "double") return {LiteralKind::Double, "0.0"};
  if (type == "char") return {LiteralKind::Char, "'\\0'"};
  return {LiteralKind::Int, "0"};
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// ---------------------------------------------------------------- L1

std::vector<Site> sites_reformat(const Program& p) {
  std::vector<Site> out;
  for (std::size_t u = 0; u < p.units.size(); ++u) {
    Site s;
    s.aux = static_cast<int>(u);
    s.location = p.units[u].path + ":1:1";
    s.detail = "layout";
    out.push_back(std::move(s));
  }
  return out;
}

bool apply_reformat(const Site& s, ApplyContext& ctx) {
  static const char* const kIndents[] = {"  ", "    ", "\t", "   ", "        "};
  if (s.aux < 0 || s.aux >= static_cast<int>(ctx.styles.size())) return false;
  PrintStyle st;
  st.indent = kIndents[ctx.rng.below(std::size(kIndents))];
  st.braceOnNewLine = ctx.rng.below(2) == 1;
  st.spaceAroundOperators = ctx.rng.below(2) == 1;
  st.spaceAfterKeyword = ctx.rng.below(2) == 1;
  st.blankLineBetweenMembers = ctx.rng.below(2) == 1;
  ctx.styles[s.aux] = st;
  ctx.restyled[s.aux] = true;
  return true;
}

// ---------------------------------------------------------------- L2

const std::set<std::string>& pinned_method_names() {
  static const std::set<std::string> names = {"main", "toString", "equals", "hashCode", "compareTo", "run"};
  return names;
}

int root_class(const Program& p, int c) {
  while (p.classes[c].super >= 0) c = p.classes[c].super;
  return c;
}

std::vector<Site> sites_rename(const Program& p, const std::optional<std::string>& entry) {
  std::vector<Site> out;
  std::set<std::string> seen;
  for (std::size_t u = 0; u < p.units.size(); ++u) {
    const auto& pkg = p.units[u].package;
    if (!pkg) continue;
    std::string joined;
    for (const auto& seg : pkg->segments) joined += (joined.empty() ? "" : ".") + seg;
    if (!seen.insert(joined).second) continue;
    Site s;
    s.aux = static_cast<int>(u);
    s.key = "package";
    s.detail = joined;
    s.location = loc(p, static_cast<int>(u), pkg->pos);
    out.push_back(std::move(s));
  }
  std::string entryClass;
  if (entry && entry->find('.') != std::string::npos) entryClass = entry->substr(0, entry->rfind('.'));
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    if (d.name == entryClass) continue;
    Site s;
    s.uid = d.uid;
    s.aux = static_cast<int>(ci);
    s.key = "class";
    s.detail = d.name;
    s.location = loc(p, p.classes[ci].unit, d.namePos);
    out.push_back(std::move(s));
  }
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    for (const Member& m : d.members)
      if (const auto* fd = m.as<FieldDecl>())
        for (const auto& v : fd->vars) {
          Site s;
          s.uid = v.uid;
          s.aux = static_cast<int>(ci);
          s.key = "field";
          s.detail = v.name;
          s.location = loc(p, p.classes[ci].unit, v.pos);
          out.push_back(std::move(s));
        }
  }
  // Method families: same name and arity within one hierarchy rename together.
  struct Family {
    std::vector<std::pair<int, int>> members;
    bool pinned = false;
  };
  std::vector<std::tuple<std::string, std::size_t, int>> order;
  std::map<std::tuple<std::string, std::size_t, int>, Family> families;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    for (std::size_t m = 0; m < d.members.size(); ++m) {
      const auto* md = d.members[m].as<MethodDecl>();
      if (!md) continue;
      auto key = std::make_tuple(md->name, md->params.size(), root_class(p, static_cast<int>(ci)));
      auto [it, fresh] = families.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.members.emplace_back(static_cast<int>(ci), static_cast<int>(m));
      if (pinned_method_names().count(md->name) || is_entry(p, static_cast<int>(ci), static_cast<int>(m)))
        it->second.pinned = true;
    }
  }
  for (const auto& key : order) {
    const Family& f = families[key];
    if (f.pinned) continue;
    Site s;
    s.key = "method";
    for (auto [c, m] : f.members) s.extra.push_back(p.decl(c).members[m].uid);
    s.uid = s.extra.front();
    auto [c0, m0] = f.members.front();
    const auto& md = std::get<MethodDecl>(p.decl(c0).members[m0].node);
    s.detail = md.name;
    s.location = loc(p, p.classes[c0].unit, md.namePos);
    out.push_back(std::move(s));
  }
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    int unit = p.classes[ci].unit;
    for (const Member& m : d.members) {
      auto add = [&](NodeUid uid, const std::string& name, SourcePos pos) {
        Site s;
        s.uid = uid;
        s.key = "local";
        s.detail = name;
        s.location = loc(p, unit, pos);
        out.push_back(std::move(s));
      };
      Member& mm = const_cast<Member&>(m);
      if (auto* ps = member_params(mm))
        for (const auto& pa : *ps) add(pa.uid, pa.name, pa.pos);
      if (Stmt* body = member_body(mm))
        walk_stmts_in(*body, [&](Stmt& st, const StmtCtx&) {
          if (auto* lv = st.as<LocalVarStmt>())
            for (const auto& v : lv->vars) add(v.uid, v.name, v.pos);
          if (auto* fe = st.as<ForEachStmt>()) add(st.uid, fe->var, fe->varPos);
        });
    }
  }
  return out;
}

bool apply_rename(Program& p, const Site& s, ApplyContext& ctx) {
  if (s.key == "package") {
    if (s.aux < 0 || s.aux >= static_cast<int>(p.units.size()) || !p.units[s.aux].package) return false;
    std::vector<std::string> old = p.units[s.aux].package->segments;
    std::vector<std::string> now = old;
    now.back() = lower(ctx.names.fresh(ctx.rng, false));
    ctx.names.reserve(now.back());
    for (auto& a : p.units)
      if (a.package && a.package->segments == old) a.package->segments = now;
    for_each_typeref(p.units, [&](TypeRef& t, NodeUid, int, int) {
      if (t.qualifier == old) t.qualifier = now;
    });
    return true;
  }
  if (s.key == "class") {
    ClassDecl* d = find_class_decl(p, s.uid);
    if (!d) return false;
    std::string old = d->name;
    std::string now = ctx.names.fresh(ctx.rng, true);
    d->name = now;
    for (auto& m : d->members)
      if (auto* cd = m.as<ConstructorDecl>()) cd->name = now;
    for_each_typeref(p.units, [&](TypeRef& t, NodeUid, int, int) {
      if (t.name == old) t.name = now;
    });
    walk_exprs(p.units, [&](Expr& e, const ExprCtx&) {
      auto* ne = e.as<NameExpr>();
      if (!ne || ne->name != old) return;
      const ExprInfo* i = info(p, e);
      if (i && i->name == NameKind::Type) ne->name = now;
    });
    return true;
  }
  if (s.key == "field") {
    FieldVar fv = find_field_var(p, s.uid);
    if (!fv.var) return false;
    std::string old = fv.var->name;
    std::string now = ctx.names.fresh(ctx.rng, false);
    fv.var->name = now;
    walk_exprs(p.units, [&](Expr& e, const ExprCtx&) {
      const ExprInfo* i = info(p, e);
      if (!i || i->name != NameKind::Field || i->fieldClass != s.aux) return;
      if (auto* ne = e.as<NameExpr>(); ne && ne->name == old) ne->name = now;
      if (auto* fa = e.as<FieldAccessExpr>(); fa && fa->name == old) fa->name = now;
    });
    return true;
  }
  if (s.key == "method") {
    std::set<std::pair<int, int>> family;
    std::vector<MethodDecl*> decls;
    for (NodeUid uid : s.extra) {
      Where w;
      Member* m = find_member(p, uid, &w);
      if (!m || !m->as<MethodDecl>()) return false;
      family.emplace(class_index(p, w), w.member);
      decls.push_back(m->as<MethodDecl>());
    }
    std::string now = ctx.names.fresh(ctx.rng, false);
    for (MethodDecl* md : decls) md->name = now;
    walk_exprs(p.units, [&](Expr& e, const ExprCtx&) {
      auto* ce = e.as<CallExpr>();
      if (!ce) return;
      const ExprInfo* i = info(p, e);
      if (i && i->call == CallKind::Declared && family.count({i->callClass, i->callMember})) ce->name = now;
    });
    return true;
  }
  if (s.key == "local") {
    std::string now = ctx.names.fresh(ctx.rng, false);
    bool found = false;
    for (auto& a : p.units)
      for (auto& c : a.classes)
        for (auto& m : c.members)
          if (auto* ps = member_params(m))
            for (auto& pa : *ps)
              if (pa.uid == s.uid) {
                pa.name = now;
                found = true;
              }
    walk_stmts(p.units, [&](Stmt& st, const StmtCtx&) {
      if (auto* lv = st.as<LocalVarStmt>())
        for (auto& v : lv->vars)
          if (v.uid == s.uid) {
            v.name = now;
            found = true;
          }
      if (auto* fe = st.as<ForEachStmt>(); fe && st.uid == s.uid) {
        fe->var = now;
        found = true;
      }
    });
    if (!found) return false;
    walk_exprs(p.units, [&](Expr& e, const ExprCtx&) {
      auto* ne = e.as<NameExpr>();
      if (!ne) return;
      const ExprInfo* i = info(p, e);
      if (i && i->name == NameKind::Local && i->local == s.uid) ne->name = now;
    });
    return true;
  }
  return false;
}

const std::map<std::string, std::vector<std::string>>& api_packages() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"ArrayList", {"java", "util"}},  {"Arrays", {"java", "util"}},     {"Collections", {"java", "util"}},
      {"HashMap", {"java", "util"}},    {"List", {"java", "util"}},       {"Map", {"java", "util"}},
      {"Random", {"java", "util"}},     {"Scanner", {"java", "util"}},    {"Integer", {"java", "lang"}},
      {"Math", {"java", "lang"}},       {"Object", {"java", "lang"}},     {"String", {"java", "lang"}},
      {"StringBuilder", {"java", "lang"}}, {"BigInteger", {"java", "math"}},
  };
  return table;
}

// Package a type name would be qualified with; empty when unknown.
std::vector<std::string> package_for(const Program& p, const std::string& name) {
  int c = p.find_class(name);
  if (c >= 0) {
    const auto& pkg = p.units[p.classes[c].unit].package;
    return pkg ? pkg->segments : std::vector<std::string>{};
  }
  auto it = api_packages().find(name);
  return it == api_packages().end() ? std::vector<std::string>{} : it->second;
}

std::vector<Site> sites_qualify(const Program& p) {
  std::vector<Site> out;
  for_each_typeref(units_of(p), [&](TypeRef& t, NodeUid owner, int slot, int unit) {
    if (t.name.empty() || is_primitive_name(t.name)) return;
    Site s;
    s.uid = owner;
    s.aux = slot;
    s.detail = t.name;
    s.location = loc(p, unit, t.pos);
    if (!t.qualifier.empty())
      s.key = "dequalify";
    else if (!package_for(p, t.name).empty())
      s.key = "qualify";
    else
      return;
    out.push_back(std::move(s));
  });
  return out;
}

bool apply_qualify(Program& p, const Site& s) {
  bool done = false;
  for_each_typeref(p.units, [&](TypeRef& t, NodeUid owner, int slot, int) {
    if (done || owner != s.uid || slot != s.aux) return;
    if (s.key == "dequalify" && !t.qualifier.empty()) {
      t.qualifier.clear();
      done = true;
    } else if (s.key == "qualify" && t.qualifier.empty()) {
      t.qualifier = package_for(p, t.name);
      done = !t.qualifier.empty();
    }
  });
  return done;
}

bool names_type(const Program& p, const Expr& e) {
  const ExprInfo* i = info(p, e);
  return e.is<NameExpr>() && i && i->name == NameKind::Type;
}

std::vector<Site> sites_static_field(const Program& p) {
  std::vector<Site> out;
  auto locals = member_locals(p);
  walk_exprs(units_of(p), [&](Expr& e, const ExprCtx& c) {
    const ExprInfo* i = info(p, e);
    if (!i || i->name != NameKind::Field || !i->isStatic) return;
    int cls = class_index(p, c.where);
    NodeUid mu = member_at(p, c.where).uid;
    Site s;
    s.uid = e.uid;
    s.location = loc(p, c.where.unit, e.pos);
    if (auto* fa = e.as<FieldAccessExpr>()) {
      if (!names_type(p, *fa->target)) return;
      if (p.find_field(cls, fa->name).first != i->fieldClass || has_local(locals, mu, fa->name)) return;
      s.key = "unqualify";
      s.detail = fa->name;
    } else if (auto* ne = e.as<NameExpr>()) {
      const std::string& owner = p.classes[i->fieldClass].name;
      if (has_local(locals, mu, owner) || p.find_field(cls, owner).first >= 0) return;
      s.key = "qualify";
      s.detail = owner + "." + ne->name;
    } else {
      return;
    }
    out.push_back(std::move(s));
  });
  return out;
}

bool apply_static_field(Program& p, const Site& s) {
  Expr* e = find_expr(p, s.uid);
  if (!e) return false;
  if (s.key == "unqualify") {
    auto* fa = e->as<FieldAccessExpr>();
    if (!fa) return false;
    std::string name = fa->name;
    SourcePos pos = e->pos;
    *e = make_expr(NameExpr{name}, pos);
    return true;
  }
  auto* ne = e->as<NameExpr>();
  if (!ne) return false;
  std::string owner = s.detail.substr(0, s.detail.find('.'));
  FieldAccessExpr fa{ExprBox(name_expr(owner)), ne->name, e->pos};
  SourcePos pos = e->pos;
  *e = make_expr(std::move(fa), pos);
  return true;
}

std::vector<Site> sites_static_call(const Program& p) {
  std::vector<Site> out;
  auto locals = member_locals(p);
  walk_exprs(units_of(p), [&](Expr& e, const ExprCtx& c) {
    auto* ce = e.as<CallExpr>();
    const ExprInfo* i = info(p, e);
    if (!ce || !i || i->call != CallKind::Declared || !i->isStatic) return;
    int cls = class_index(p, c.where);
    NodeUid mu = member_at(p, c.where).uid;
    Site s;
    s.uid = e.uid;
    s.location = loc(p, c.where.unit, e.pos);
    if (ce->target) {
      if (!names_type(p, **ce->target)) return;
      if (!(p.find_method(cls, ce->name, ce->args.size()) == MethodRef{i->callClass, i->callMember})) return;
      s.key = "unqualify";
      s.detail = ce->name;
    } else {
      const std::string& owner = p.classes[i->callClass].name;
      if (has_local(locals, mu, owner) || p.find_field(cls, owner).first >= 0) return;
      s.key = "qualify";
      s.detail = owner + "." + ce->name;
    }
    out.push_back(std::move(s));
  });
  return out;
}

bool apply_static_call(Program& p, const Site& s) {
  Expr* e = find_expr(p, s.uid);
  auto* ce = e ? e->as<CallExpr>() : nullptr;
  if (!ce) return false;
  if (s.key == "unqualify") {
    if (!ce->target) return false;
    ce->target.reset();
    return true;
  }
  if (ce->target) return false;
  ce->target = ExprBox(name_expr(s.detail.substr(0, s.detail.find('.'))));
  return true;
}

// ---------------------------------------------------------------- L3

std::vector<Site> sites_access(const Program& p) {
  std::vector<Site> out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    int unit = p.classes[ci].unit;
    Site s;
    s.uid = d.uid;
    s.key = "class";
    s.detail = d.name;
    s.location = loc(p, unit, d.namePos);
    out.push_back(s);
    for (std::size_t m = 0; m < d.members.size(); ++m) {
      const Member& mem = d.members[m];
      if (mem.as<InitializerDecl>() || is_entry(p, static_cast<int>(ci), static_cast<int>(m))) continue;
      Site t;
      t.uid = mem.uid;
      t.key = "member";
      t.location = loc(p, unit, mem.pos);
      out.push_back(std::move(t));
    }
  }
  return out;
}

bool apply_access(Program& p, const Site& s, ApplyContext& ctx) {
  Modifiers* mods = nullptr;
  bool cls = s.key == "class";
  if (cls) {
    if (ClassDecl* d = find_class_decl(p, s.uid)) mods = &d->mods;
  } else if (Member* m = find_member(p, s.uid)) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (!std::is_same_v<T, InitializerDecl>) mods = &n.mods;
        },
        m->node);
  }
  if (!mods) return false;
  std::vector<Access> options = cls ? std::vector<Access>{Access::Public, Access::Default}
                                    : std::vector<Access>{Access::Public, Access::Protected, Access::Default};
  options.erase(std::remove(options.begin(), options.end(), mods->access), options.end());
  mods->access = options[ctx.rng.below(options.size())];
  return true;
}

std::vector<Site> sites_field_init(const Program& p) {
  std::vector<Site> out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    for (const Member& m : d.members) {
      const auto* fd = m.as<FieldDecl>();
      if (!fd || fd->mods.isFinal) continue;
      for (std::size_t v = 0; v < fd->vars.size(); ++v) {
        if (!fd->vars[v].init) continue;
        bool later = false;
        for (std::size_t w = v + 1; w < fd->vars.size(); ++w) later = later || fd->vars[w].init.has_value();
        if (later) continue;
        Site s;
        s.uid = fd->vars[v].uid;
        s.detail = fd->vars[v].name;
        s.location = loc(p, p.classes[ci].unit, fd->vars[v].pos);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

bool apply_field_init(Program& p, const Site& s) {
  FieldVar fv = find_field_var(p, s.uid);
  if (!fv.var || !fv.var->init || fv.decl->mods.isFinal) return false;
  SourcePos pos = fv.var->pos;
  Expr init = as_array_creation(std::move(*fv.var->init), fv.decl->type);
  fv.var->init.reset();
  std::vector<Stmt> body;
  body.push_back(expr_stmt(boxed_assign(name_expr(fv.var->name), std::move(init), pos)));
  InitializerDecl ib{fv.decl->mods.isStatic, block(std::move(body))};
  auto& members = class_at(p, fv.where).members;
  members.insert(members.begin() + fv.where.member + 1, Member{pos, next_uid(), std::move(ib)});
  return true;
}

std::vector<Site> sites_statements(const Program& p) {
  std::vector<Site> out;
  walk_stmts(units_of(p), [&](Stmt& s, const StmtCtx& c) {
    if (!c.list || !is_body_member(member_at(p, c.where))) return;
    Site site;
    site.uid = s.uid;
    site.location = loc(p, c.where.unit, s.pos);
    out.push_back(std::move(site));
  });
  return out;
}

// One site in front of every member of every class, then one per statement
// of a method or constructor body (the constant goes in front of that member).
std::vector<Site> sites_redundant_const(const Program& p) {
  std::vector<Site> out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    for (const Member& m : d.members) {
      Site s;
      s.uid = m.uid;
      s.key = "member";
      s.location = loc(p, p.classes[ci].unit, m.pos);
      out.push_back(std::move(s));
    }
  }
  auto stmts = sites_statements(p);
  out.insert(out.end(), stmts.begin(), stmts.end());
  return out;
}

bool apply_redundant_const(Program& p, const Site& s, ApplyContext& ctx) {
  static const char* const kWords[] = {"alpha", "beta", "gamma", "delta", "omega", "sigma", "kappa", "theta"};
  Where where;
  if (s.key == "member") {
    if (!find_member(p, s.uid, &where)) return false;
  } else {
    StmtCtx c;
    if (!find_stmt(p, s.uid, &c)) return false;
    where = c.where;
  }
  FieldDecl fd;
  fd.mods.access = Access::Private;
  fd.mods.isStatic = true;
  fd.mods.isFinal = true;
  Literal lit;
  if (ctx.rng.below(2) == 0) {
    fd.type = simple_type("int");
    lit = {LiteralKind::Int, std::to_string(ctx.rng.below(1000))};
  } else {
    fd.type = simple_type("String");
    lit = {LiteralKind::String,
           "\"" + std::string(kWords[ctx.rng.below(std::size(kWords))]) + std::to_string(ctx.rng.below(100)) + "\""};
  }
  VarDeclarator v;
  v.name = ctx.names.fresh_constant(ctx.rng);
  v.init = make_expr(LiteralExpr{lit});
  v.uid = next_uid();
  fd.vars.push_back(std::move(v));
  auto& members = class_at(p, where).members;
  members.insert(members.begin() + where.member, Member{{}, next_uid(), std::move(fd)});
  return true;
}

std::vector<Site> sites_synchronized(const Program& p) {
  std::vector<Site> out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci)
    for (const Member& m : p.decl(static_cast<int>(ci)).members)
      if (const auto* md = m.as<MethodDecl>(); md && !md->mods.isSynchronized) {
        Site s;
        s.uid = m.uid;
        s.detail = md->name;
        s.location = loc(p, p.classes[ci].unit, md->namePos);
        out.push_back(std::move(s));
      }
  return out;
}

bool apply_synchronized(Program& p, const Site& s) {
  Member* m = find_member(p, s.uid);
  auto* md = m ? m->as<MethodDecl>() : nullptr;
  if (!md || md->mods.isSynchronized) return false;
  md->mods.isSynchronized = true;
  return true;
}

bool zeroable(const TypeRef& t) { return !t.array && t.qualifier.empty() && is_primitive_name(t.name); }

std::vector<Site> sites_default_value(const Program& p) {
  std::vector<Site> out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci)
    for (const Member& m : p.decl(static_cast<int>(ci)).members)
      if (const auto* fd = m.as<FieldDecl>(); fd && !fd->mods.isFinal && zeroable(fd->type))
        for (const auto& v : fd->vars)
          if (!v.init) {
            Site s;
            s.uid = v.uid;
            s.key = "field";
            s.detail = v.name;
            s.location = loc(p, p.classes[ci].unit, v.pos);
            out.push_back(std::move(s));
          }
  walk_stmts(units_of(p), [&](Stmt& st, const StmtCtx& c) {
    auto* lv = st.as<LocalVarStmt>();
    if (!lv || !zeroable(lv->type)) return;
    for (const auto& v : lv->vars)
      if (!v.init) {
        Site s;
        s.uid = v.uid;
        s.key = "local";
        s.detail = v.name;
        s.location = loc(p, c.where.unit, v.pos);
        out.push_back(std::move(s));
      }
  });
  return out;
}

bool apply_default_value(Program& p, const Site& s) {
  if (s.key == "field") {
    FieldVar fv = find_field_var(p, s.uid);
    if (!fv.var || fv.var->init) return false;
    fv.var->init = make_expr(LiteralExpr{zero_literal(fv.decl->type.name)}, fv.var->pos);
    return true;
  }
  bool done = false;
  walk_stmts(p.units, [&](Stmt& st, const StmtCtx&) {
    if (auto* lv = st.as<LocalVarStmt>())
      for (auto& v : lv->vars)
        if (v.uid == s.uid && !v.init && !done) {
          v.init = make_expr(LiteralExpr{zero_literal(lv->type.name)}, v.pos);
          done = true;
        }
  });
  return done;
}

bool mentions_name(Stmt& s, const std::set<std::string>& names) {
  if (contains_expr(s, [&](const Expr& e) {
        const auto* ne = e.as<NameExpr>();
        return ne && names.count(ne->name);
      }))
    return true;
  return contains_stmt(s, [&](const Stmt& x, const StmtCtx&) {
    if (const auto* lv = x.as<LocalVarStmt>())
      for (const auto& v : lv->vars)
        if (names.count(v.name)) return true;
    if (const auto* fe = x.as<ForEachStmt>()) return names.count(fe->var) > 0;
    return false;
  });
}

std::vector<Site> sites_hoist(const Program& p) {
  std::vector<Site> out;
  walk_stmts(units_of(p), [&](Stmt& s, const StmtCtx& c) {
    auto* lv = s.as<LocalVarStmt>();
    if (!lv || !c.inBlock || c.index == 0) return;
    std::set<std::string> names;
    for (const auto& v : lv->vars) names.insert(v.name);
    for (std::size_t k = 0; k < c.index; ++k)
      if (mentions_name((*c.list)[k], names)) return;
    Site site;
    site.uid = s.uid;
    site.detail = lv->vars.front().name;
    site.location = loc(p, c.where.unit, s.pos);
    out.push_back(std::move(site));
  });
  return out;
}

bool apply_hoist(Program& p, const Site& s) {
  StmtCtx c;
  Stmt* st = find_stmt(p, s.uid, &c);
  if (!st || !c.inBlock || !c.list || c.index == 0 || !st->is<LocalVarStmt>()) return false;
  LocalVarStmt lv = std::move(*st->as<LocalVarStmt>());
  SourcePos pos = st->pos;
  LocalVarStmt head;
  head.type = lv.type;
  std::vector<Stmt> assigns;
  for (auto& v : lv.vars) {
    head.vars.push_back(VarDeclarator{v.name, v.pos, std::nullopt, next_uid()});
    if (v.init)
      assigns.push_back(expr_stmt(boxed_assign(name_expr(v.name), as_array_creation(std::move(*v.init), lv.type), v.pos)));
  }
  std::vector<Stmt>& list = *c.list;
  list.erase(list.begin() + c.index);
  list.insert(list.begin() + c.index, std::make_move_iterator(assigns.begin()), std::make_move_iterator(assigns.end()));
  list.insert(list.begin(), make_stmt(std::move(head), pos));
  return true;
}

std::vector<Site> sites_rearrange(const Program& p) {
  std::vector<Site> out;
  for (std::size_t ci = 0; ci < p.classes.size(); ++ci) {
    const ClassDecl& d = p.decl(static_cast<int>(ci));
    int n = 0;
    for (const Member& m : d.members) n += is_body_member(m) ? 1 : 0;
    if (n < 2) continue;
    Site s;
    s.uid = d.uid;
    s.detail = d.name;
    s.location = loc(p, p.classes[ci].unit, d.namePos);
    out.push_back(std::move(s));
  }
  return out;
}

bool apply_rearrange(Program& p, const Site& s, ApplyContext& ctx) {
  ClassDecl* d = find_class_decl(p, s.uid);
  if (!d) return false;
  std::vector<std::size_t> slots;
  std::vector<Member> moved;
  for (std::size_t i = 0; i < d->members.size(); ++i)
    if (is_body_member(d->members[i])) {
      slots.push_back(i);
      moved.push_back(std::move(d->members[i]));
    }
  if (slots.size() < 2) return false;
  ctx.rng.shuffle(moved);
  for (std::size_t k = 0; k < slots.size(); ++k) d->members[slots[k]] = std::move(moved[k]);
  return true;
}

// ---------------------------------------------------------------- L4

// A statement leaves the run other than by falling through.
bool escapes(Stmt& s) {
  return contains_stmt(s, [](const Stmt& x, const StmtCtx& c) {
    return x.is<ReturnStmt>() || (x.is<BreakStmt>() && c.breakDepth == 0) || (x.is<ContinueStmt>() && c.loopDepth == 0);
  });
}

std::vector<std::pair<std::size_t, std::size_t>> runs_of(std::vector<Stmt>& stmts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= stmts.size(); ++i) {
    if (i == stmts.size() || escapes(stmts[i])) {
      if (i > start) out.emplace_back(start, i - start);
      start = i + 1;
    }
  }
  return out;
}

struct ExtractPlan {
  std::vector<std::pair<std::string, TypeRef>> inputs;
  bool hasOutput = false;
  bool outputDeclared = false;  // declared inside the run
  std::string outName;
  TypeRef outType;
};

std::optional<ExtractPlan> plan_extract(const Program& p, Member& m, std::vector<Stmt>& list, std::size_t start,
                                        std::size_t count) {
  Stmt* body = member_body(m);
  if (!body) return std::nullopt;
  std::set<NodeUid> settled;  // parameters, foreach variables, initialised declarations
  if (auto* ps = member_params(m))
    for (const auto& pa : *ps) settled.insert(pa.uid);
  walk_stmts_in(*body, [&](Stmt& s, const StmtCtx&) {
    if (auto* lv = s.as<LocalVarStmt>())
      for (const auto& v : lv->vars)
        if (v.init) settled.insert(v.uid);
    if (s.is<ForEachStmt>()) settled.insert(s.uid);
  });
  auto local_of = [&](const Expr& e) -> NodeUid {
    const ExprInfo* i = info(p, e);
    return e.is<NameExpr>() && i && i->name == NameKind::Local ? i->local : 0;
  };
  std::map<NodeUid, int> total, inRun;
  std::vector<NodeUid> order;
  std::set<NodeUid> written, declared, topDeclared;
  walk_exprs_in(*body, [&](Expr& e, const ExprCtx&) {
    if (NodeUid l = local_of(e)) ++total[l];
  });
  for (std::size_t k = start; k < start + count; ++k) {
    walk_exprs_in(list[k], [&](Expr& e, const ExprCtx& c) {
      NodeUid l = local_of(e);
      if (!l) return;
      if (!inRun[l]++) order.push_back(l);
      if (c.lvalue) written.insert(l);
    });
    walk_stmts_in(list[k], [&](Stmt& s, const StmtCtx&) {
      if (auto* lv = s.as<LocalVarStmt>())
        for (const auto& v : lv->vars) declared.insert(v.uid);
      if (s.is<ForEachStmt>()) declared.insert(s.uid);
    });
    if (auto* lv = list[k].as<LocalVarStmt>())
      for (const auto& v : lv->vars) topDeclared.insert(v.uid);
  }
  ExtractPlan plan;
  std::set<std::string> names;
  std::vector<NodeUid> outputs;
  for (NodeUid l : order) {
    bool outside = total[l] > inRun[l];
    auto li = p.bindings.locals.find(l);
    if (li == p.bindings.locals.end() || is_unknown(li->second.type)) return std::nullopt;
    if (declared.count(l)) {
      if (outside) {
        if (!topDeclared.count(l)) return std::nullopt;
        outputs.push_back(l);
      }
      continue;
    }
    if (!settled.count(l) || !names.insert(li->second.name).second) return std::nullopt;
    plan.inputs.emplace_back(li->second.name, li->second.type);
    if (written.count(l) && outside) outputs.push_back(l);
  }
  // Declared in the run but only read after it.
  for (NodeUid l : topDeclared)
    if (!inRun.count(l) && total[l] > 0) outputs.push_back(l);
  if (outputs.size() > 1) return std::nullopt;
  if (!outputs.empty()) {
    // the extracted method returns it, so it must hold a value on every path
    if (!settled.count(outputs.front())) return std::nullopt;
    auto found = p.bindings.locals.find(outputs.front());
    if (found == p.bindings.locals.end() || is_unknown(found->second.type)) return std::nullopt;
    const LocalInfo& li = found->second;
    plan.hasOutput = true;
    plan.outputDeclared = declared.count(outputs.front()) > 0;
    plan.outName = li.name;
    plan.outType = li.type;
  }
  return plan;
}

std::vector<Site> sites_extract(const Program& p) {
  std::vector<Site> out;
  walk_stmts(units_of(p), [&](Stmt& s, const StmtCtx& c) {
    auto* b = s.as<BlockStmt>();
    if (!b) return;
    Member& m = const_cast<Member&>(member_at(p, c.where));
    if (!is_body_member(m)) return;
    for (auto [start, count] : runs_of(b->stmts)) {
      if (!plan_extract(p, m, b->stmts, start, count)) continue;
      Site site;
      site.uid = b->stmts[start].uid;
      site.aux = static_cast<int>(count);
      site.extra = {s.uid};
      site.location = loc(p, c.where.unit, b->stmts[start].pos);
      site.detail = std::to_string(count) + " statement(s)";
      out.push_back(std::move(site));
    }
  });
  return out;
}

bool apply_extract(Program& p, const Site& s, ApplyContext& ctx) {
  if (s.extra.empty()) return false;
  StmtCtx c;
  Stmt* bs = find_stmt(p, s.extra.front(), &c);
  auto* b = bs ? bs->as<BlockStmt>() : nullptr;
  if (!b) return false;
  Member& m = member_at(p, c.where);
  if (!is_body_member(m)) return false;
  std::size_t start = b->stmts.size();
  for (std::size_t i = 0; i < b->stmts.size(); ++i)
    if (b->stmts[i].uid == s.uid) start = i;
  std::size_t count = static_cast<std::size_t>(s.aux);
  auto runs = runs_of(b->stmts);
  if (std::find(runs.begin(), runs.end(), std::make_pair(start, count)) == runs.end()) return false;
  auto plan = plan_extract(p, m, b->stmts, start, count);
  if (!plan) return false;

  MethodDecl md;
  md.mods.access = Access::Private;
  md.mods.isStatic = c.where.staticCtx;
  if (plan->hasOutput) md.returnType = plan->outType;
  md.name = ctx.names.fresh(ctx.rng, false);
  CallExpr call;
  call.name = md.name;
  for (const auto& [name, type] : plan->inputs) {
    Param pa;
    pa.type = type;
    pa.name = name;
    pa.uid = next_uid();
    md.params.push_back(std::move(pa));
    call.args.push_back(name_expr(name));
  }
  SourcePos pos = b->stmts[start].pos;
  std::vector<Stmt> moved(std::make_move_iterator(b->stmts.begin() + start),
                          std::make_move_iterator(b->stmts.begin() + start + count));
  if (plan->hasOutput) moved.push_back(make_stmt(ReturnStmt{name_expr(plan->outName)}));
  md.body = block(std::move(moved));

  Expr callExpr = make_expr(std::move(call), pos);
  Stmt replacement;
  if (!plan->hasOutput) {
    replacement = expr_stmt(std::move(callExpr));
  } else if (plan->outputDeclared) {
    LocalVarStmt lv;
    lv.type = plan->outType;
    lv.vars.push_back(VarDeclarator{plan->outName, pos, std::move(callExpr), next_uid()});
    replacement = make_stmt(std::move(lv), pos);
  } else {
    replacement = expr_stmt(boxed_assign(name_expr(plan->outName), std::move(callExpr), pos));
  }
  replacement.pos = pos;
  b->stmts.erase(b->stmts.begin() + start, b->stmts.begin() + start + count);
  b->stmts.insert(b->stmts.begin() + start, std::move(replacement));
  auto& members = class_at(p, c.where).members;
  members.insert(members.begin() + c.where.member + 1, Member{{}, next_uid(), std::move(md)});
  return true;
}

// ---------------------------------------------------------------- L5

// Targets that can be evaluated twice without observable difference.
bool simple_target(const Program& p, const Expr& t) {
  if (const auto* ne = t.as<NameExpr>()) {
    const ExprInfo* i = info(p, t);
    return ne && i && (i->name == NameKind::Local || i->name == NameKind::Field);
  }
  if (const auto* fa = t.as<FieldAccessExpr>()) {
    const Expr& tg = *fa->target;
    if (tg.is<ThisExpr>()) return true;
    const ExprInfo* i = info(p, tg);
    return tg.is<NameExpr>() && i && (i->name == NameKind::Type || i->name == NameKind::Local);
  }
  if (const auto* aa = t.as<ArrayAccessExpr>()) {
    const ExprInfo* ai = info(p, *aa->array);
    const ExprInfo* ii = info(p, *aa->index);
    bool arrayOk = aa->array->is<NameExpr>() && ai && (ai->name == NameKind::Local || ai->name == NameKind::Field);
    bool indexOk = aa->index->is<LiteralExpr>() || (aa->index->is<NameExpr>() && ii && ii->name == NameKind::Local);
    return arrayOk && indexOk;
  }
  return false;
}

std::optional<TypeRef> target_type(const Program& p, const Expr& t) {
  const ExprInfo* i = info(p, t);
  if (!i || is_unknown(i->type) || i->type.array) return std::nullopt;
  return i->type;
}

Expr copy_fresh(const Expr& e) {
  Expr c = e;
  refresh_uids(c);
  return c;
}

Expr narrowed(Expr value, const TypeRef& target, const std::string& resultType) {
  if (!target.is_numeric() || target.name == resultType) return value;
  SourcePos pos = value.pos;
  return make_expr(CastExpr{simple_type(target.name), ExprBox(std::move(value))}, pos);
}

std::vector<Site> sites_compound(const Program& p) {
  std::vector<Site> out;
  walk_exprs(units_of(p), [&](Expr& e, const ExprCtx& c) {
    auto* a = e.as<AssignExpr>();
    if (!a || a->op == AssignOp::Assign || !simple_target(p, *a->target)) return;
    auto t = target_type(p, *a->target);
    if (!t || !(t->is_numeric() || (t->is_string() && a->op == AssignOp::Add))) return;
    Site s;
    s.uid = e.uid;
    s.detail = to_string(a->op);
    s.location = loc(p, c.where.unit, e.pos);
    out.push_back(std::move(s));
  });
  return out;
}

bool apply_compound(Program& p, const Site& s) {
  Expr* e = find_expr(p, s.uid);
  auto* a = e ? e->as<AssignExpr>() : nullptr;
  if (!a || a->op == AssignOp::Assign) return false;
  auto t = target_type(p, *a->target);
  if (!t) return false;
  const ExprInfo* vi = info(p, *a->value);
  std::string valueType = vi && !is_unknown(vi->type) && !vi->type.array ? vi->type.name : "";
  BinaryOp op = *compound_binary(a->op);
  Expr value = std::move(*a->value);
  Expr bin = make_expr(BinaryExpr{op, ExprBox(copy_fresh(*a->target)), ExprBox(std::move(value))}, e->pos);
  if (t->is_numeric()) {
    std::string result = is_primitive_name(valueType) ? promote(t->name, valueType) : promote(t->name, "int");
    bin = narrowed(std::move(bin), *t, result);
  }
  a->op = AssignOp::Assign;
  a->value = ExprBox(std::move(bin));
  return true;
}

bool is_step(UnaryOp op) {
  return op == UnaryOp::PreInc || op == UnaryOp::PreDec || op == UnaryOp::PostInc || op == UnaryOp::PostDec;
}

std::vector<Site> sites_incdec(const Program& p) {
  std::vector<Site> out;
  walk_exprs(units_of(p), [&](Expr& e, const ExprCtx& c) {
    auto* u = e.as<UnaryExpr>();
    if (!u || !is_step(u->op) || !simple_target(p, *u->operand)) return;
    bool post = u->op == UnaryOp::PostInc || u->op == UnaryOp::PostDec;
    if (post && !c.stmtTop) return;
    auto t = target_type(p, *u->operand);
    if (!t || !t->is_numeric()) return;
    Site s;
    s.uid = e.uid;
    s.detail = to_string(u->op);
    s.location = loc(p, c.where.unit, e.pos);
    out.push_back(std::move(s));
  });
  return out;
}

bool apply_incdec(Program& p, const Site& s) {
  Expr* e = find_expr(p, s.uid);
  auto* u = e ? e->as<UnaryExpr>() : nullptr;
  if (!u || !is_step(u->op)) return false;
  auto t = target_type(p, *u->operand);
  if (!t) return false;
  BinaryOp op = (u->op == UnaryOp::PreInc || u->op == UnaryOp::PostInc) ? BinaryOp::Add : BinaryOp::Sub;
  SourcePos pos = e->pos;
  Expr bin = make_expr(BinaryExpr{op, ExprBox(copy_fresh(*u->operand)), ExprBox(int_literal(1))}, pos);
  bin = narrowed(std::move(bin), *t, promote(t->name, "int"));
  Expr target = std::move(*u->operand);
  *e = boxed_assign(std::move(target), std::move(bin), pos);
  return true;
}

bool continues_self(Stmt& body) {
  return contains_stmt(body, [](const Stmt& x, const StmtCtx& c) { return x.is<ContinueStmt>() && c.loopDepth == 0; });
}

std::vector<Site> sites_for_while(const Program& p) {
  std::vector<Site> out;
  walk_stmts(units_of(p), [&](Stmt& s, const StmtCtx& c) {
    auto* f = s.as<ForStmt>();
    if (!f || continues_self(*f->body)) return;
    Site site;
    site.uid = s.uid;
    site.location = loc(p, c.where.unit, s.pos);
    out.push_back(std::move(site));
  });
  return out;
}

bool apply_for_while(Program& p, const Site& s) {
  Stmt* st = find_stmt(p, s.uid);
  auto* f = st ? st->as<ForStmt>() : nullptr;
  if (!f || continues_self(*f->body)) return false;
  SourcePos pos = st->pos;
  std::vector<Stmt> outer = std::move(f->init);
  Expr cond = f->cond ? std::move(*f->cond) : make_expr(LiteralExpr{Literal{LiteralKind::Boolean, "true"}}, pos);
  std::vector<Stmt> updates;
  std::set<std::string> updateNames;
  for (auto& u : f->update) {
    walk_exprs_in(u, [&](Expr& x, const ExprCtx&) {
      if (auto* ne = x.as<NameExpr>()) updateNames.insert(ne->name);
    });
    updates.push_back(expr_stmt(std::move(u)));
  }
  Stmt body = std::move(*f->body);
  bool flatten = false;
  if (auto* b = body.as<BlockStmt>()) {
    flatten = true;
    for (auto& x : b->stmts)
      if (auto* lv = x.as<LocalVarStmt>())
        for (auto& v : lv->vars) flatten = flatten && !updateNames.count(v.name);
  }
  std::vector<Stmt> loopBody;
  if (flatten)
    loopBody = std::move(body.as<BlockStmt>()->stmts);
  else
    loopBody.push_back(std::move(body));
  for (auto& u : updates) loopBody.push_back(std::move(u));
  Stmt loop = make_stmt(WhileStmt{std::move(cond), StmtBox(block(std::move(loopBody)))}, pos);
  if (outer.empty()) {
    *st = std::move(loop);
  } else {
    outer.push_back(std::move(loop));
    Stmt wrapped = block(std::move(outer));
    wrapped.pos = pos;
    *st = std::move(wrapped);
  }
  return true;
}

struct SwitchGroup {
  std::vector<const Expr*> labels;  // nullptr for default
  std::vector<const Stmt*> body;    // without the closing break
};

// Null when the switch has fallthrough or a break other than a closing one.
std::optional<std::vector<SwitchGroup>> switch_groups(SwitchStmt& sw) {
  std::vector<SwitchGroup> groups;
  SwitchGroup pending;
  std::vector<std::set<std::string>> declaredByGroup;
  for (std::size_t i = 0; i < sw.cases.size(); ++i) {
    SwitchCase& k = sw.cases[i];
    pending.labels.push_back(k.label ? &*k.label : nullptr);
    bool last = i + 1 == sw.cases.size();
    if (k.body.empty() && !last) continue;
    std::size_t n = k.body.size();
    bool closed = n > 0 && (k.body.back().is<BreakStmt>() || k.body.back().is<ReturnStmt>());
    if (!closed && !last) return std::nullopt;
    std::size_t keep = n > 0 && k.body.back().is<BreakStmt>() ? n - 1 : n;
    std::set<std::string> decls;
    for (std::size_t j = 0; j < keep; ++j) {
      Stmt& x = k.body[j];
      if (contains_stmt(x, [](const Stmt& y, const StmtCtx& c) { return y.is<BreakStmt>() && c.breakDepth == 0; }))
        return std::nullopt;
      pending.body.push_back(&x);
      if (auto* lv = x.as<LocalVarStmt>())
        for (auto& v : lv->vars) decls.insert(v.name);
    }
    groups.push_back(std::move(pending));
    declaredByGroup.push_back(std::move(decls));
    pending = {};
  }
  // Case bodies share one scope; a name declared in one and used in another blocks the split.
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t h = 0; h < groups.size(); ++h) {
      if (g == h || declaredByGroup[g].empty()) continue;
      for (const Stmt* x : groups[h].body)
        if (mentions_name(const_cast<Stmt&>(*x), declaredByGroup[g])) return std::nullopt;
    }
  return groups;
}

bool switch_selector_ok(const Program& p, const Expr& sel) {
  const ExprInfo* i = info(p, sel);
  if (!i) return false;
  if (i->type.is_string()) return false;
  if (sel.is<NameExpr>() && i->name == NameKind::Local) return true;
  return !is_unknown(i->type) && !i->type.array && is_primitive_name(i->type.name) && i->type.name != "boolean";
}

std::vector<Site> sites_switch_if(const Program& p) {
  std::vector<Site> out;
  walk_stmts(units_of(p), [&](Stmt& s, const StmtCtx& c) {
    auto* sw = s.as<SwitchStmt>();
    if (!sw || !switch_selector_ok(p, sw->selector) || !switch_groups(*sw)) return;
    Site site;
    site.uid = s.uid;
    site.location = loc(p, c.where.unit, s.pos);
    out.push_back(std::move(site));
  });
  return out;
}

bool apply_switch_if(Program& p, const Site& s, ApplyContext& ctx) {
  Stmt* st = find_stmt(p, s.uid);
  auto* sw = st ? st->as<SwitchStmt>() : nullptr;
  if (!sw || !switch_selector_ok(p, sw->selector)) return false;
  auto groups = switch_groups(*sw);
  if (!groups) return false;
  SourcePos pos = st->pos;
  std::vector<Stmt> prefix;
  std::string selName;
  const ExprInfo* si = info(p, sw->selector);
  if (sw->selector.is<NameExpr>() && si->name == NameKind::Local) {
    selName = sw->selector.as<NameExpr>()->name;
  } else {
    selName = ctx.names.fresh(ctx.rng, false);
    LocalVarStmt lv;
    lv.type = simple_type(si->type.name);
    lv.vars.push_back(VarDeclarator{selName, pos, std::move(sw->selector), next_uid()});
    prefix.push_back(make_stmt(std::move(lv), pos));
  }
  auto body_of = [](const SwitchGroup& g) {
    std::vector<Stmt> b;
    for (const Stmt* x : g.body) {
      Stmt c = *x;
      refresh_uids(c);
      b.push_back(std::move(c));
    }
    return block(std::move(b));
  };
  struct Branch {
    Expr cond;
    Stmt body;
  };
  std::vector<Branch> branches;
  std::optional<Stmt> fallback;
  for (const auto& g : *groups)
    for (const Expr* l : g.labels) {
      if (!l) {
        if (!g.body.empty()) fallback = body_of(g);
        continue;
      }
      Expr cond = make_expr(BinaryExpr{BinaryOp::Eq, ExprBox(name_expr(selName)), ExprBox(copy_fresh(*l))}, l->pos);
      branches.push_back({std::move(cond), body_of(g)});
    }
  std::optional<Stmt> chain = std::move(fallback);
  for (auto it = branches.rbegin(); it != branches.rend(); ++it) {
    IfStmt is{std::move(it->cond), StmtBox(std::move(it->body)), std::nullopt};
    if (chain) is.elseStmt = StmtBox(std::move(*chain));
    chain = make_stmt(std::move(is), pos);
  }
  if (chain) prefix.push_back(std::move(*chain));
  Stmt result = prefix.size() == 1 && !prefix.front().is<LocalVarStmt>() ? std::move(prefix.front())
                                                                         : block(std::move(prefix));
  result.pos = pos;
  *st = std::move(result);
  return true;
}

std::string literal_type(LiteralKind k) {
  switch (k) {
    case LiteralKind::Int: return "int";
    case LiteralKind::Long: return "long";
    case LiteralKind::Float: return "float";
    case LiteralKind::Double: return "double";
    case LiteralKind::Char: return "char";
    case LiteralKind::String: return "String";
    case LiteralKind::Boolean: return "boolean";
    case LiteralKind::Null: break;
  }
  return "";
}

std::vector<Site> sites_literal_const(const Program& p) {
  std::vector<Site> out;
  walk_exprs(units_of(p), [&](Expr& e, const ExprCtx& c) {
    auto* l = e.as<LiteralExpr>();
    if (!l || l->value.kind == LiteralKind::Null || c.caseLabel || c.negated || c.fieldInit) return;
    Site s;
    s.uid = e.uid;
    s.detail = l->value.spelling;
    s.location = loc(p, c.where.unit, e.pos);
    out.push_back(std::move(s));
  });
  return out;
}

std::pair<Expr*, Where> indexed(Program& p, NodeUid uid, ApplyContext& ctx) {
  if (ctx.exprIndex.empty())
    walk_exprs(p.units, [&](Expr& e, const ExprCtx& c) { ctx.exprIndex.emplace(e.uid, std::make_pair(&e, c.where)); });
  auto it = ctx.exprIndex.find(uid);
  if (it == ctx.exprIndex.end()) return {nullptr, {}};
  return it->second;
}

bool apply_literal_const(Program& p, const Site& s, ApplyContext& ctx) {
  auto [e, w] = indexed(p, s.uid, ctx);
  auto* l = e ? e->as<LiteralExpr>() : nullptr;
  if (!l || e->uid != s.uid) return false;
  ClassDecl& cd = class_at(p, w);
  std::string key = std::to_string(cd.uid) + "/" + literal_type(l->value.kind) + "/" + l->value.spelling;
  auto it = ctx.constants.find(key);
  if (it == ctx.constants.end()) {
    FieldDecl fd;
    fd.mods.access = Access::Private;
    fd.mods.isStatic = true;
    fd.mods.isFinal = true;
    fd.type = simple_type(literal_type(l->value.kind));
    VarDeclarator v;
    v.name = ctx.names.fresh_constant(ctx.rng);
    v.init = make_expr(LiteralExpr{l->value});
    v.uid = next_uid();
    it = ctx.constants.emplace(key, v.name).first;
    fd.vars.push_back(std::move(v));
    cd.members.insert(cd.members.begin(), Member{{}, next_uid(), std::move(fd)});
  }
  SourcePos pos = e->pos;
  *e = make_expr(NameExpr{it->second}, pos);
  return true;
}

std::vector<Site> sites_brackets(const Program& p) {
  std::vector<Site> out;
  walk_exprs(units_of(p), [&](Expr& e, const ExprCtx& c) {
    if (c.lvalue || c.stmtTop || c.caseLabel || e.is<ArrayInitExpr>() || e.is<ParenExpr>()) return;
    if (c.parent && c.parent->is<ParenExpr>()) return;
    if (names_type(p, e)) return;
    if (c.negated && e.is<LiteralExpr>()) return;
    Site s;
    s.uid = e.uid;
    s.location = loc(p, c.where.unit, e.pos);
    out.push_back(std::move(s));
  });
  return out;
}

bool apply_brackets(Program& p, const Site& s, ApplyContext& ctx) {
  auto [e, w] = indexed(p, s.uid, ctx);
  if (!e || e->uid != s.uid) return false;
  SourcePos pos = e->pos;
  Expr inner = std::move(*e);
  *e = make_expr(ParenExpr{ExprBox(std::move(inner))}, pos);
  return true;
}

}  // namespace

const std::vector<TransformationSpec>& transformations() {
  static const std::vector<TransformationSpec> table = {
      {1, "Reformat source code", false},
      {2, "Rename identifiers", false},
      {2, "Qualify/de-qualify type names", false},
      {2, "Replace static field access with static import", false},
      {2, "Replace static method call with static import", false},
      {3, "Change access modifiers", false},
      {3, "Move field assignment to initialiser block", false},
      {3, "Declare redundant constants", true},
      {3, "Add synchronised modifier", false},
      {3, "Assign default value to variable declaration", true},
      {3, "Move variable declarations to start of block", false},
      {3, "Rearrange member declarations", false},
      {4, "Extract block to new method", false},
      {5, "Expand combined assignment expression", false},
      {5, "Expand prefix/postfix expression", false},
      {5, "Replace for statement with while loop", false},
      {5, "Replace switch statement with if statements", false},
      {5, "Replace literal value with static constant", false},
      {5, "Surround expression with brackets", false},
  };
  static_assert(kCount == 19);
  return table;
}

int find_transformation(std::string_view name) {
  const auto& t = transformations();
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i].name == name) return static_cast<int>(i);
  return -1;
}

bool reresolve_each(int t) { return t == kExtract; }

std::vector<Site> list_sites(const Program& p, int t, const std::optional<std::string>& entry) {
  switch (t) {
    case kReformat: return sites_reformat(p);
    case kRename: return sites_rename(p, entry);
    case kQualify: return sites_qualify(p);
    case kStaticField: return sites_static_field(p);
    case kStaticCall: return sites_static_call(p);
    case kAccess: return sites_access(p);
    case kFieldInit: return sites_field_init(p);
    case kRedundantConst: return sites_redundant_const(p);
    case kSynchronized: return sites_synchronized(p);
    case kDefaultValue: return sites_default_value(p);
    case kHoistDecl: return sites_hoist(p);
    case kRearrange: return sites_rearrange(p);
    case kExtract: return sites_extract(p);
    case kCompound: return sites_compound(p);
    case kIncDec: return sites_incdec(p);
    case kForWhile: return sites_for_while(p);
    case kSwitchIf: return sites_switch_if(p);
    case kLiteralConst: return sites_literal_const(p);
    case kBrackets: return sites_brackets(p);
    default: return {};
  }
}

bool apply_site(Program& p, int t, const Site& s, ApplyContext& ctx) {
  switch (t) {
    case kReformat: return apply_reformat(s, ctx);
    case kRename: return apply_rename(p, s, ctx);
    case kQualify: return apply_qualify(p, s);
    case kStaticField: return apply_static_field(p, s);
    case kStaticCall: return apply_static_call(p, s);
    case kAccess: return apply_access(p, s, ctx);
    case kFieldInit: return apply_field_init(p, s);
    case kRedundantConst: return apply_redundant_const(p, s, ctx);
    case kSynchronized: return apply_synchronized(p, s);
    case kDefaultValue: return apply_default_value(p, s);
    case kHoistDecl: return apply_hoist(p, s);
    case kRearrange: return apply_rearrange(p, s, ctx);
    case kExtract: return apply_extract(p, s, ctx);
    case kCompound: return apply_compound(p, s);
    case kIncDec: return apply_incdec(p, s);
    case kForWhile: return apply_for_while(p, s);
    case kSwitchIf: return apply_switch_if(p, s, ctx);
    case kLiteralConst: return apply_literal_const(p, s, ctx);
    case kBrackets: return apply_brackets(p, s, ctx);
    default: return false;
  }
}

}  // namespace bsim::mutator
