#pragma once

#include <string>

#include "bsim/frontend/ast.hpp"
#include "bsim/frontend/lexer.hpp"

namespace bsim::frontend {

struct SourceUnit {
  std::string path;
  std::string text;
};

// Parses one source unit. Throws ParseError on any deviation from the
// grammar; never returns a partial tree.
Ast parse_unit(const SourceUnit& unit);

// Parses a standalone expression (used by tests and the mutator).
Expr parse_expression(const std::string& text);

}  // namespace bsim::frontend
