#pragma once

#include <string>

#include "bsim/frontend/ast.hpp"

namespace bsim::frontend {

// Layout knobs; every combination re-parses to the same tree.
struct PrintStyle {
  std::string indent = "    ";
  bool braceOnNewLine = false;
  bool spaceAroundOperators = true;
  bool spaceAfterKeyword = true;
  bool blankLineBetweenMembers = true;
};

std::string print_unit(const Ast& ast, const PrintStyle& style = {});
std::string print_expr(const Expr& e, const PrintStyle& style = {});
std::string print_type(const TypeRef& t);

}  // namespace bsim::frontend
