#pragma once

// Name classification and static typing over a resolved program. Every
// expression gets an ExprInfo keyed by its uid; locals and parameters are
// identified by the uid of their declaring node.

#include <string>
#include <unordered_map>
#include <vector>

#include "bsim/frontend/ast.hpp"

namespace bsim::frontend {

struct ResolvedProgram;

enum class NameKind {
  None,
  Local,  // local variable, parameter or foreach variable
  Field,  // field of a declared class
  Type,   // the expression names a type (static access receiver)
};

enum class CallKind {
  None,
  Declared,  // method of a declared class (followed)
  Api,       // stubbed boundary interaction
};

struct ExprInfo {
  TypeRef type;  // empty name: statically unknown
  NameKind name = NameKind::None;
  NodeUid local = 0;      // NameKind::Local
  int fieldClass = -1;    // NameKind::Field: declaring class index
  bool isStatic = false;  // static field / static call
  std::string typeName;   // NameKind::Type: simple type name

  CallKind call = CallKind::None;
  int callClass = -1;   // Declared: class holding the selected declaration
  int callMember = -1;  // Declared: member index in that class
  std::string apiType;  // Api: receiver type text ("String", "?", ...)
};

struct LocalInfo {
  std::string name;
  TypeRef type;
  NodeUid owner = 0;  // uid of the member declaring it
};

struct Bindings {
  std::unordered_map<NodeUid, ExprInfo> exprs;
  std::unordered_map<NodeUid, LocalInfo> locals;

  const ExprInfo& at(NodeUid uid) const;
};

bool is_unknown(const TypeRef& t);
TypeRef unknown_type();
TypeRef simple_type(const std::string& name, bool array = false);

// Binary numeric promotion for the primitive names.
std::string promote(const std::string& a, const std::string& b);

// Walks every body in `program`, filling bindings. Referenced undeclared
// type names are added to `boundary`.
Bindings analyze_scopes(const ResolvedProgram& program, std::vector<std::string>& warnings,
                        std::vector<std::string>& boundary);

}  // namespace bsim::frontend
