#pragma once

// Abstract syntax tree for the analysed object-oriented mini-language.
//
// Every node that the mutator may target carries a `uid`, unique within a
// process, so transformation sites can be identified across rewrites.
// Identifier-bearing nodes carry a source position.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bsim/frontend/box.hpp"

namespace bsim::frontend {

struct SourcePos {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

using NodeUid = std::uint64_t;

// Allocates a fresh uid. Thread-safe.
NodeUid next_uid();

struct TypeRef {
  std::vector<std::string> qualifier;  // package segments, e.g. {"java", "util"}
  std::string name;                    // simple name: int, String, Scanner, User
  bool array = false;
  SourcePos pos;

  bool is_primitive() const;
  bool is_numeric() const;
  bool is_string() const { return !array && name == "String"; }
  // Canonical spelling used for runtime types: simple name plus "[]".
  std::string str() const { return array ? name + "[]" : name; }
  TypeRef element() const {
    TypeRef t = *this;
    t.array = false;
    return t;
  }
};

bool is_primitive_name(const std::string& name);

enum class LiteralKind { Int, Long, Float, Double, Char, String, Boolean, Null };

struct Literal {
  LiteralKind kind = LiteralKind::Int;
  std::string spelling;  // exact source spelling, including quotes/suffixes
};

enum class UnaryOp { Plus, Minus, Not, PreInc, PreDec, PostInc, PostDec };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class AssignOp { Assign, Add, Sub, Mul, Div, Mod };

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);
const char* to_string(AssignOp op);
// Binary operator equivalent to a compound assignment (Assign has none).
std::optional<BinaryOp> compound_binary(AssignOp op);

struct Expr;
using ExprBox = Box<Expr>;

struct LiteralExpr {
  Literal value;
};
struct NameExpr {
  std::string name;
};
struct ThisExpr {};
struct FieldAccessExpr {
  ExprBox target;
  std::string name;
  SourcePos namePos;
};
struct ArrayAccessExpr {
  ExprBox array;
  ExprBox index;
};
struct CallExpr {
  std::optional<ExprBox> target;  // absent for unqualified calls
  std::string name;
  SourcePos namePos;
  std::vector<Expr> args;
};
struct NewObjectExpr {
  TypeRef type;
  std::vector<Expr> args;
};
struct ArrayInitExpr {
  std::vector<Expr> elements;
};
struct NewArrayExpr {
  TypeRef elementType;
  std::optional<ExprBox> size;
  std::optional<ArrayInitExpr> init;
};
struct UnaryExpr {
  UnaryOp op;
  ExprBox operand;
};
struct BinaryExpr {
  BinaryOp op;
  ExprBox lhs;
  ExprBox rhs;
};
struct AssignExpr {
  AssignOp op;
  ExprBox target;
  ExprBox value;
};
struct ConditionalExpr {
  ExprBox cond;
  ExprBox thenExpr;
  ExprBox elseExpr;
};
struct CastExpr {
  TypeRef type;
  ExprBox operand;
};
struct ParenExpr {
  ExprBox inner;
};

using ExprNode = std::variant<LiteralExpr, NameExpr, ThisExpr, FieldAccessExpr, ArrayAccessExpr, CallExpr,
                              NewObjectExpr, NewArrayExpr, ArrayInitExpr, UnaryExpr, BinaryExpr, AssignExpr,
                              ConditionalExpr, CastExpr, ParenExpr>;

struct Expr {
  SourcePos pos;
  NodeUid uid = 0;
  ExprNode node;

  template <typename T>
  T* as() {
    return std::get_if<T>(&node);
  }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

Expr make_expr(ExprNode node, SourcePos pos = {});

struct Stmt;
using StmtBox = Box<Stmt>;

struct VarDeclarator {
  std::string name;
  SourcePos pos;
  std::optional<Expr> init;
  NodeUid uid = 0;
};

struct BlockStmt {
  std::vector<Stmt> stmts;
};
struct LocalVarStmt {
  bool isFinal = false;
  TypeRef type;
  std::vector<VarDeclarator> vars;
};
struct ExprStmt {
  Expr expr;
};
struct IfStmt {
  Expr cond;
  StmtBox thenStmt;
  std::optional<StmtBox> elseStmt;
};
struct WhileStmt {
  Expr cond;
  StmtBox body;
};
struct DoWhileStmt {
  StmtBox body;
  Expr cond;
};
struct ForStmt {
  std::vector<Stmt> init;  // a single LocalVarStmt or a list of ExprStmt
  std::optional<Expr> cond;
  std::vector<Expr> update;
  StmtBox body;
};
struct ForEachStmt {
  bool isFinal = false;
  TypeRef type;
  std::string var;
  SourcePos varPos;
  Expr iterable;
  StmtBox body;
};
struct SwitchCase {
  std::optional<Expr> label;  // absent for `default`
  std::vector<Stmt> body;
};
struct SwitchStmt {
  Expr selector;
  std::vector<SwitchCase> cases;
};
struct ReturnStmt {
  std::optional<Expr> value;
};
struct BreakStmt {};
struct ContinueStmt {};
struct EmptyStmt {};

using StmtNode = std::variant<BlockStmt, LocalVarStmt, ExprStmt, IfStmt, WhileStmt, DoWhileStmt, ForStmt, ForEachStmt,
                              SwitchStmt, ReturnStmt, BreakStmt, ContinueStmt, EmptyStmt>;

struct Stmt {
  SourcePos pos;
  NodeUid uid = 0;
  StmtNode node;

  template <typename T>
  T* as() {
    return std::get_if<T>(&node);
  }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

Stmt make_stmt(StmtNode node, SourcePos pos = {});

enum class Access { Default, Public, Private, Protected };

struct Modifiers {
  Access access = Access::Default;
  bool isStatic = false;
  bool isFinal = false;
  bool isSynchronized = false;
};

struct Param {
  bool isFinal = false;
  TypeRef type;
  std::string name;
  SourcePos pos;
  NodeUid uid = 0;
};

struct FieldDecl {
  Modifiers mods;
  TypeRef type;
  std::vector<VarDeclarator> vars;
};

struct MethodDecl {
  Modifiers mods;
  std::optional<TypeRef> returnType;  // absent for void
  std::string name;
  SourcePos namePos;
  std::vector<Param> params;
  Stmt body;  // always a BlockStmt
};

struct ConstructorDecl {
  Modifiers mods;
  std::string name;
  SourcePos namePos;
  std::vector<Param> params;
  Stmt body;  // always a BlockStmt
};

struct InitializerDecl {
  bool isStatic = false;
  Stmt body;  // always a BlockStmt
};

using MemberNode = std::variant<FieldDecl, MethodDecl, ConstructorDecl, InitializerDecl>;

struct Member {
  SourcePos pos;
  NodeUid uid = 0;
  MemberNode node;

  template <typename T>
  T* as() {
    return std::get_if<T>(&node);
  }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

struct ClassDecl {
  Modifiers mods;
  std::string name;
  SourcePos namePos;
  std::optional<TypeRef> superclass;
  std::vector<Member> members;
  NodeUid uid = 0;
};

struct PackageDecl {
  std::vector<std::string> segments;
  SourcePos pos;
};

struct Ast {
  std::string path;
  std::optional<PackageDecl> package;
  std::vector<ClassDecl> classes;
};

}  // namespace bsim::frontend
