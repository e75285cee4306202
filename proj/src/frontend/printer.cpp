#include "bsim/frontend/printer.hpp"

#include <sstream>

namespace bsim::frontend {

namespace {

// Binding strength, loosest first.
enum Prec {
  kAssign = 1,
  kConditional,
  kOr,
  kAnd,
  kEquality,
  kRelational,
  kAdditive,
  kMultiplicative,
  kUnary,
  kPostfix,
  kPrimary,
};

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return kEquality;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return kRelational;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdditive;
    default: return kMultiplicative;
  }
}

int prec_of(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AssignExpr>) return kAssign;
        else if constexpr (std::is_same_v<T, ConditionalExpr>) return kConditional;
        else if constexpr (std::is_same_v<T, BinaryExpr>) return binary_prec(n.op);
        else if constexpr (std::is_same_v<T, UnaryExpr>)
          return (n.op == UnaryOp::PostInc || n.op == UnaryOp::PostDec) ? kPostfix : kUnary;
        // `new int[n]` cannot take a postfix index without parentheses
        else if constexpr (std::is_same_v<T, CastExpr> || std::is_same_v<T, NewArrayExpr>) return kUnary;
        else if constexpr (std::is_same_v<T, FieldAccessExpr> || std::is_same_v<T, CallExpr> ||
                           std::is_same_v<T, ArrayAccessExpr>)
          return kPostfix;
        else return kPrimary;
      },
      e.node);
}

bool is_op_char(char c) { return c == '+' || c == '-'; }

// Concatenates two fragments, inserting a space when the boundary would
// otherwise lex differently (a - -b, i++ + j).
void glue(std::string& out, const std::string& next) {
  if (!out.empty() && !next.empty() && is_op_char(out.back()) && is_op_char(next.front())) out += ' ';
  out += next;
}

const char* access_word(Access a) {
  switch (a) {
    case Access::Public: return "public ";
    case Access::Private: return "private ";
    case Access::Protected: return "protected ";
    default: return "";
  }
}

std::string modifiers(const Modifiers& m) {
  std::string s = access_word(m.access);
  if (m.isStatic) s += "static ";
  if (m.isFinal) s += "final ";
  if (m.isSynchronized) s += "synchronized ";
  return s;
}

class Printer {
 public:
  explicit Printer(const PrintStyle& style) : st_(style) {}

  std::string expr(const Expr& e, int minPrec = kAssign) const {
    std::string s = expr_raw(e);
    if (prec_of(e) < minPrec) return "(" + s + ")";
    return s;
  }

  std::string unit(const Ast& ast) {
    if (ast.package) {
      std::string p;
      for (std::size_t i = 0; i < ast.package->segments.size(); ++i) {
        if (i) p += '.';
        p += ast.package->segments[i];
      }
      out_ << "package " << p << ";\n\n";
    }
    for (std::size_t i = 0; i < ast.classes.size(); ++i) {
      if (i) out_ << "\n";
      class_decl(ast.classes[i]);
    }
    return out_.str();
  }

 private:
  std::string op(const char* o) const { return st_.spaceAroundOperators ? std::string(" ") + o + " " : o; }
  std::string kw(const char* k) const { return st_.spaceAfterKeyword ? std::string(k) + " " : k; }
  std::string comma() const { return st_.spaceAroundOperators ? ", " : ","; }

  std::string args(const std::vector<Expr>& as) const {
    std::string s = "(";
    for (std::size_t i = 0; i < as.size(); ++i) {
      if (i) s += comma();
      s += expr(as[i]);
    }
    return s + ")";
  }

  std::string array_init(const ArrayInitExpr& init) const {
    std::string s = "{";
    for (std::size_t i = 0; i < init.elements.size(); ++i) {
      if (i) s += comma();
      s += expr(init.elements[i]);
    }
    return s + "}";
  }

  std::string expr_raw(const Expr& e) const {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LiteralExpr>) {
            return n.value.spelling;
          } else if constexpr (std::is_same_v<T, NameExpr>) {
            return n.name;
          } else if constexpr (std::is_same_v<T, ThisExpr>) {
            return "this";
          } else if constexpr (std::is_same_v<T, FieldAccessExpr>) {
            return expr(*n.target, kPostfix) + "." + n.name;
          } else if constexpr (std::is_same_v<T, ArrayAccessExpr>) {
            return expr(*n.array, kPostfix) + "[" + expr(*n.index) + "]";
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            std::string s = n.target ? expr(**n.target, kPostfix) + "." : "";
            return s + n.name + args(n.args);
          } else if constexpr (std::is_same_v<T, NewObjectExpr>) {
            return "new " + print_type(n.type) + args(n.args);
          } else if constexpr (std::is_same_v<T, NewArrayExpr>) {
            std::string s = "new " + print_type(n.elementType) + "[";
            if (n.size) return s + expr(**n.size) + "]";
            return s + "]" + (n.init ? array_init(*n.init) : "{}");
          } else if constexpr (std::is_same_v<T, ArrayInitExpr>) {
            return array_init(n);
          } else if constexpr (std::is_same_v<T, UnaryExpr>) {
            if (n.op == UnaryOp::PostInc || n.op == UnaryOp::PostDec)
              return expr(*n.operand, kPostfix) + to_string(n.op);
            std::string s = to_string(n.op);
            glue(s, expr(*n.operand, kUnary));
            return s;
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            int p = binary_prec(n.op);
            std::string s = expr(*n.lhs, p);
            glue(s, op(to_string(n.op)));
            glue(s, expr(*n.rhs, p + 1));
            return s;
          } else if constexpr (std::is_same_v<T, AssignExpr>) {
            std::string s = expr(*n.target, kPostfix);
            glue(s, op(to_string(n.op)));
            glue(s, expr(*n.value, kAssign));
            return s;
          } else if constexpr (std::is_same_v<T, ConditionalExpr>) {
            return expr(*n.cond, kOr) + op("?") + expr(*n.thenExpr) + op(":") + expr(*n.elseExpr, kConditional);
          } else if constexpr (std::is_same_v<T, CastExpr>) {
            std::string s = "(" + print_type(n.type) + ")";
            if (st_.spaceAroundOperators) s += ' ';
            return s + expr(*n.operand, kUnary);
          } else {
            return "(" + expr(*n.inner) + ")";
          }
        },
        e.node);
  }

  void line(const std::string& s) {
    for (int i = 0; i < depth_; ++i) out_ << st_.indent;
    out_ << s << "\n";
  }

  void open(const std::string& head) {
    if (head.empty()) {
      line("{");
    } else if (st_.braceOnNewLine) {
      line(head);
      line("{");
    } else {
      line(head + " {");
    }
    ++depth_;
  }

  void close() {
    --depth_;
    line("}");
  }

  void body_of(const Stmt& s) {
    if (const auto* b = s.as<BlockStmt>()) {
      for (const Stmt& x : b->stmts) stmt(x);
    } else {
      stmt(s);
    }
  }

  void class_decl(const ClassDecl& c) {
    std::string head = modifiers(c.mods) + "class " + c.name;
    if (c.superclass) head += " extends " + print_type(*c.superclass);
    open(head);
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (i && st_.blankLineBetweenMembers) out_ << "\n";
      member(c.members[i]);
    }
    close();
  }

  std::string params(const std::vector<Param>& ps) const {
    std::string s = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) s += comma();
      if (ps[i].isFinal) s += "final ";
      s += print_type(ps[i].type) + " " + ps[i].name;
    }
    return s + ")";
  }

  std::string declarators(const std::vector<VarDeclarator>& vars) const {
    std::string s;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) s += comma();
      s += vars[i].name;
      if (vars[i].init) s += op("=") + expr(*vars[i].init);
    }
    return s;
  }

  void member(const Member& m) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FieldDecl>) {
            line(modifiers(n.mods) + print_type(n.type) + " " + declarators(n.vars) + ";");
          } else if constexpr (std::is_same_v<T, MethodDecl>) {
            std::string ret = n.returnType ? print_type(*n.returnType) : "void";
            block_body(modifiers(n.mods) + ret + " " + n.name + params(n.params), n.body);
          } else if constexpr (std::is_same_v<T, ConstructorDecl>) {
            block_body(modifiers(n.mods) + n.name + params(n.params), n.body);
          } else {
            block_body(n.isStatic ? "static" : "", n.body);
          }
        },
        m.node);
  }

  void block_body(const std::string& head, const Stmt& body) {
    open(head);
    body_of(body);
    close();
  }

  // If without else at the tail of `s`; printing it bare before an `else`
  // would rebind the else.
  static bool open_if(const Stmt& s) {
    if (const auto* i = s.as<IfStmt>()) return !i->elseStmt || open_if(**i->elseStmt);
    if (const auto* w = s.as<WhileStmt>()) return open_if(*w->body);
    if (const auto* f = s.as<ForStmt>()) return open_if(*f->body);
    if (const auto* f = s.as<ForEachStmt>()) return open_if(*f->body);
    return false;
  }

  // Statement in a nested position (loop body).
  void sub(const std::string& head, const Stmt& s) {
    if (s.is<BlockStmt>()) {
      block_body(head, s);
    } else {
      line(head);
      ++depth_;
      stmt(s);
      --depth_;
    }
  }

  std::string for_init(const ForStmt& f) const {
    std::string s;
    for (std::size_t i = 0; i < f.init.size(); ++i) {
      const Stmt& st = f.init[i];
      if (const auto* lv = st.as<LocalVarStmt>()) {
        s += (lv->isFinal ? "final " : "") + print_type(lv->type) + " " + declarators(lv->vars);
      } else {
        if (i) s += comma();
        s += expr(std::get<ExprStmt>(st.node).expr);
      }
    }
    return s;
  }

  void if_stmt(const IfStmt& first) {
    std::string prefix;
    const IfStmt* i = &first;
    for (;;) {
      std::string head = prefix + kw("if") + "(" + expr(i->cond) + ")";
      bool hasElse = i->elseStmt.has_value();
      bool block = i->thenStmt->is<BlockStmt>() || (hasElse && open_if(*i->thenStmt));
      bool joinElse = hasElse && block && !st_.braceOnNewLine;
      if (block) {
        open(head);
        body_of(*i->thenStmt);
        --depth_;
        if (!joinElse) line("}");
      } else {
        sub(head, *i->thenStmt);
      }
      if (!hasElse) return;
      prefix = joinElse ? "} else " : "else ";
      const Stmt& e = **i->elseStmt;
      if (const auto* ei = e.as<IfStmt>()) {
        i = ei;
        continue;
      }
      std::string eh = joinElse ? "} else" : "else";
      if (e.is<BlockStmt>()) {
        block_body(eh, e);
      } else {
        line(eh);
        ++depth_;
        stmt(e);
        --depth_;
      }
      return;
    }
  }

  void stmt(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BlockStmt>) {
            block_body("", s);
          } else if constexpr (std::is_same_v<T, LocalVarStmt>) {
            line((n.isFinal ? "final " : "") + print_type(n.type) + " " + declarators(n.vars) + ";");
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            line(expr(n.expr) + ";");
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            if_stmt(n);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            sub(kw("while") + "(" + expr(n.cond) + ")", *n.body);
          } else if constexpr (std::is_same_v<T, DoWhileStmt>) {
            std::string tail = kw("while") + "(" + expr(n.cond) + ");";
            open("do");
            body_of(*n.body);
            --depth_;
            if (st_.braceOnNewLine) {
              line("}");
              line(tail);
            } else {
              line("} " + tail);
            }
          } else if constexpr (std::is_same_v<T, ForStmt>) {
            std::string h = kw("for") + "(" + for_init(n) + ";";
            if (n.cond) h += (st_.spaceAroundOperators ? " " : "") + expr(*n.cond);
            h += ";";
            for (std::size_t i = 0; i < n.update.size(); ++i) {
              h += i ? comma() : std::string(st_.spaceAroundOperators ? " " : "");
              h += expr(n.update[i]);
            }
            sub(h + ")", *n.body);
          } else if constexpr (std::is_same_v<T, ForEachStmt>) {
            std::string h = kw("for") + "(" + (n.isFinal ? "final " : "") + print_type(n.type) + " " + n.var + " : " +
                            expr(n.iterable) + ")";
            sub(h, *n.body);
          } else if constexpr (std::is_same_v<T, SwitchStmt>) {
            open(kw("switch") + "(" + expr(n.selector) + ")");
            for (const SwitchCase& c : n.cases) {
              line(c.label ? "case " + expr(*c.label) + ":" : "default:");
              ++depth_;
              for (const Stmt& b : c.body) stmt(b);
              --depth_;
            }
            close();
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            line(n.value ? "return " + expr(*n.value) + ";" : "return;");
          } else if constexpr (std::is_same_v<T, BreakStmt>) {
            line("break;");
          } else if constexpr (std::is_same_v<T, ContinueStmt>) {
            line("continue;");
          } else {
            line(";");
          }
        },
        s.node);
  }

  const PrintStyle& st_;
  std::ostringstream out_;
  int depth_ = 0;
};

}  // namespace

std::string print_type(const TypeRef& t) {
  std::string s;
  for (const auto& q : t.qualifier) s += q + ".";
  s += t.name;
  if (t.array) s += "[]";
  return s;
}

std::string print_unit(const Ast& ast, const PrintStyle& style) { return Printer(style).unit(ast); }

std::string print_expr(const Expr& e, const PrintStyle& style) { return Printer(style).expr(e); }

}  // namespace bsim::frontend
