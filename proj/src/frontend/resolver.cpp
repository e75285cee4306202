#include "bsim/frontend/resolver.hpp"

#include <unordered_map>

namespace bsim::frontend {

int ResolvedProgram::find_class(const std::string& name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].name == name) return static_cast<int>(i);
  return -1;
}

bool ResolvedProgram::is_subclass(int cls, int ancestor) const {
  for (int c = cls; c >= 0; c = classes[c].super)
    if (c == ancestor) return true;
  return false;
}

MethodRef ResolvedProgram::find_method(int cls, const std::string& name, std::size_t arity) const {
  for (int c = cls; c >= 0; c = classes[c].super) {
    const ClassDecl& d = decl(c);
    for (std::size_t m = 0; m < d.members.size(); ++m) {
      const auto* md = d.members[m].as<MethodDecl>();
      if (md && md->name == name && md->params.size() == arity) return {c, static_cast<int>(m)};
    }
  }
  return {};
}

MethodRef ResolvedProgram::find_constructor(int cls, std::size_t arity) const {
  const ClassDecl& d = decl(cls);
  for (std::size_t m = 0; m < d.members.size(); ++m) {
    const auto* cd = d.members[m].as<ConstructorDecl>();
    if (cd && cd->params.size() == arity) return {cls, static_cast<int>(m)};
  }
  return {};
}

std::pair<int, int> ResolvedProgram::find_field(int cls, const std::string& name) const {
  for (int c = cls; c >= 0; c = classes[c].super) {
    const auto& fs = classes[c].fields;
    for (std::size_t f = 0; f < fs.size(); ++f)
      if (fs[f].name == name) return {c, static_cast<int>(f)};
  }
  return {-1, -1};
}

std::string ResolvedProgram::signature(MethodRef r) const {
  const ClassDecl& d = decl(r.cls);
  const Member& m = d.members[r.member];
  const std::vector<Param>* ps = nullptr;
  std::string name;
  if (const auto* md = m.as<MethodDecl>()) {
    ps = &md->params;
    name = md->name;
  } else if (const auto* cd = m.as<ConstructorDecl>()) {
    ps = &cd->params;
    name = "<init>";
  } else {
    return d.name + ".<clinit>";
  }
  std::string s = d.name + "." + name + "(";
  for (std::size_t i = 0; i < ps->size(); ++i) {
    if (i) s += ",";
    s += (*ps)[i].type.str();
  }
  return s + ")";
}

ResolvedProgram resolve_program(std::vector<Ast> units, const std::optional<std::string>& entry) {
  ResolvedProgram p;
  p.units = std::move(units);
  std::unordered_map<std::string, int> byName;
  for (std::size_t u = 0; u < p.units.size(); ++u) {
    const Ast& ast = p.units[u];
    for (std::size_t c = 0; c < ast.classes.size(); ++c) {
      const ClassDecl& cd = ast.classes[c];
      if (byName.count(cd.name))
        throw ResolveError(ast.path + ":" + std::to_string(cd.namePos.line) + ":" + std::to_string(cd.namePos.column) +
                           ": duplicate class '" + cd.name + "'");
      ClassInfo ci;
      ci.name = cd.name;
      ci.unit = static_cast<int>(u);
      ci.index = static_cast<int>(c);
      for (std::size_t m = 0; m < cd.members.size(); ++m) {
        const auto* f = cd.members[m].as<FieldDecl>();
        if (!f) continue;
        for (std::size_t v = 0; v < f->vars.size(); ++v) {
          FieldInfo fi{f->vars[v].name, f->type, f->mods, static_cast<int>(m), static_cast<int>(v)};
          for (const FieldInfo& other : ci.fields)
            if (other.name == fi.name)
              throw ResolveError(ast.path + ": duplicate field '" + fi.name + "' in class '" + cd.name + "'");
          ci.fields.push_back(std::move(fi));
        }
      }
      byName.emplace(cd.name, static_cast<int>(p.classes.size()));
      p.classes.push_back(std::move(ci));
    }
  }
  for (ClassInfo& ci : p.classes) {
    const ClassDecl& cd = p.units[ci.unit].classes[ci.index];
    if (!cd.superclass) continue;
    auto it = byName.find(cd.superclass->name);
    if (it == byName.end())
      throw ResolveError(p.units[ci.unit].path + ": class '" + cd.name + "' extends unresolvable class '" +
                         cd.superclass->name + "'");
    ci.super = it->second;
  }
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    int slow = static_cast<int>(c);
    std::size_t steps = 0;
    for (int k = p.classes[c].super; k >= 0; k = p.classes[k].super) {
      if (k == slow || ++steps > p.classes.size())
        throw ResolveError("inheritance cycle through class '" + p.classes[c].name + "'");
    }
  }

  std::vector<std::string> boundary;
  p.bindings = analyze_scopes(p, p.warnings, boundary);
  for (auto& b : boundary)
    if (!byName.count(b)) p.apiBoundary.insert(b);

  // Entry points, declaration order.
  std::optional<std::string> wantClass, wantMethod;
  if (entry) {
    auto dot = entry->rfind('.');
    if (dot == std::string::npos) {
      wantMethod = *entry;
    } else {
      wantClass = entry->substr(0, dot);
      wantMethod = entry->substr(dot + 1);
    }
  }
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    const ClassDecl& cd = p.decl(static_cast<int>(c));
    if (wantClass && cd.name != *wantClass) continue;
    for (std::size_t m = 0; m < cd.members.size(); ++m) {
      const auto* md = cd.members[m].as<MethodDecl>();
      if (!md || !md->mods.isStatic) continue;
      if (wantMethod ? md->name == *wantMethod : md->name == "main")
        p.entryPoints.push_back({static_cast<int>(c), static_cast<int>(m)});
    }
  }
  if (entry && p.entryPoints.empty()) throw ResolveError("entry method '" + *entry + "' is not a declared static method");
  if (p.entryPoints.empty()) p.warnings.push_back("no static main method; program has no entry points");
  return p;
}

ResolvedProgram resolve_program(const std::vector<SourceUnit>& units, const std::optional<std::string>& entry) {
  std::vector<Ast> asts;
  asts.reserve(units.size());
  for (const SourceUnit& u : units) asts.push_back(parse_unit(u));
  return resolve_program(std::move(asts), entry);
}

}  // namespace bsim::frontend
