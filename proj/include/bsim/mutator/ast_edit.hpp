#pragma once

// Traversal and editing helpers shared by the transformations.

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bsim/frontend/ast.hpp"

namespace bsim::mutator {

using frontend::Ast;
using frontend::Expr;
using frontend::NodeUid;
using frontend::Stmt;

// Seeded stream. Only the engine is taken from the standard library; the
// derived draws are spelled out so they do not vary between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // True with probability percent/100.
  bool chance(double percent) { return unit() * 100.0 < percent; }
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

struct Where {
  int unit = -1;
  int cls = -1;     // index into Ast::classes
  int member = -1;  // index into ClassDecl::members
  bool staticCtx = false;
};

struct ExprCtx {
  Where where;
  bool lvalue = false;    // assignment target or ++/-- operand
  bool stmtTop = false;   // expression statement or for-update element
  bool caseLabel = false;
  bool negated = false;   // direct operand of unary minus
  bool receiver = false;  // target of a field access or call
  bool fieldInit = false;
  const Expr* parent = nullptr;
};

struct StmtCtx {
  Where where;
  std::vector<Stmt>* list = nullptr;  // containing block or case body
  std::size_t index = 0;
  bool inBlock = false;  // `list` belongs to a BlockStmt
  int loopDepth = 0;     // loops enclosing the statement within its member
  int breakDepth = 0;    // loops and switches enclosing the statement
};

// Pre-order walks over every body and field initializer.
void walk_exprs(std::vector<Ast>& units, const std::function<void(Expr&, const ExprCtx&)>& fn);
void walk_stmts(std::vector<Ast>& units, const std::function<void(Stmt&, const StmtCtx&)>& fn);
// Expressions beneath one statement or expression (inclusive).
void walk_exprs_in(Stmt& s, const std::function<void(Expr&, const ExprCtx&)>& fn);
void walk_exprs_in(Expr& e, const std::function<void(Expr&, const ExprCtx&)>& fn);
void walk_stmts_in(Stmt& s, const std::function<void(Stmt&, const StmtCtx&)>& fn);

// Gives every node in the subtree a fresh uid.
void refresh_uids(Stmt& s);
void refresh_uids(Expr& e);

// Every identifier spelled anywhere in the program.
std::set<std::string> collect_identifiers(const std::vector<Ast>& units);

// Fresh identifiers that collide with nothing already in use.
class NameGen {
 public:
  explicit NameGen(std::set<std::string> taken) : taken_(std::move(taken)) {}
  std::string fresh(Rng& rng, bool capital, const std::string& hint = {});
  std::string fresh_constant(Rng& rng);
  void reserve(const std::string& s) { taken_.insert(s); }

 private:
  std::set<std::string> taken_;
};

Expr name_expr(const std::string& name);
Expr int_literal(long long v);
Stmt expr_stmt(Expr e);
Stmt block(std::vector<Stmt> stmts);

// Strips redundant parentheses.
const Expr& unparen(const Expr& e);

bool contains_expr(Stmt& s, const std::function<bool(const Expr&)>& pred);
bool contains_stmt(Stmt& s, const std::function<bool(const Stmt&, const StmtCtx&)>& pred);

}  // namespace bsim::mutator
