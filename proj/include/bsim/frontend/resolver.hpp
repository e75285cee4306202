#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsim/frontend/ast.hpp"
#include "bsim/frontend/parser.hpp"
#include "bsim/frontend/scope.hpp"

namespace bsim::frontend {

class ResolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldInfo {
  std::string name;
  TypeRef type;
  Modifiers mods;
  int member = -1;      // index into ClassDecl::members
  int declarator = -1;  // index into FieldDecl::vars
};

struct ClassInfo {
  std::string name;
  int unit = -1;
  int index = -1;  // index into Ast::classes
  int super = -1;  // class table index, -1 if none
  std::vector<FieldInfo> fields;
};

struct MethodRef {
  int cls = -1;
  int member = -1;
  friend bool operator==(const MethodRef&, const MethodRef&) = default;
};

struct ResolvedProgram {
  std::vector<Ast> units;
  std::vector<ClassInfo> classes;  // declaration order
  std::vector<MethodRef> entryPoints;
  std::set<std::string> apiBoundary;
  std::vector<std::string> warnings;
  Bindings bindings;

  int find_class(const std::string& name) const;
  const ClassDecl& decl(int cls) const { return units[classes[cls].unit].classes[classes[cls].index]; }
  const MethodDecl& method(MethodRef r) const { return std::get<MethodDecl>(decl(r.cls).members[r.member].node); }
  bool is_declared(const std::string& typeName) const { return find_class(typeName) >= 0; }
  bool is_subclass(int cls, int ancestor) const;

  // Lookups walk the superclass chain; -1 member when absent.
  MethodRef find_method(int cls, const std::string& name, std::size_t arity) const;
  MethodRef find_constructor(int cls, std::size_t arity) const;
  // Returns {declaring class, field index}; {-1,-1} when absent.
  std::pair<int, int> find_field(int cls, const std::string& name) const;

  // "Class.method(T1,T2)".
  std::string signature(MethodRef r) const;
};

// Resolves a submission. `entry`, when given, names the entry method
// ("method" or "Class.method") instead of every static main.
ResolvedProgram resolve_program(std::vector<Ast> units, const std::optional<std::string>& entry = std::nullopt);
ResolvedProgram resolve_program(const std::vector<SourceUnit>& units,
                                const std::optional<std::string>& entry = std::nullopt);

}  // namespace bsim::frontend
