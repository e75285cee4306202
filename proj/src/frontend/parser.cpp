// Recursive-descent parser for the mini-language.
//
//   unit      := [package qname ';'] class*
//   class     := modifiers 'class' ID ['extends' type] '{' member* '}'
//   member    := modifiers (field | method | ctor) | ['static'] block | ';'
//   statement := block | local | if | while | do | for | foreach | switch
//              | return | break | continue | expr ';' | ';'
//   expr      := assignment, with the usual Java precedence below it

#include "bsim/frontend/parser.hpp"

#include <atomic>
#include <cctype>

namespace bsim::frontend {

NodeUid next_uid() {
  static std::atomic<NodeUid> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

bool is_primitive_name(const std::string& name) {
  return name == "byte" || name == "short" || name == "int" || name == "long" || name == "float" ||
         name == "double" || name == "char" || name == "boolean";
}

bool TypeRef::is_primitive() const { return !array && is_primitive_name(name); }

bool TypeRef::is_numeric() const { return is_primitive() && name != "boolean"; }

const char* to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::Plus: return "+";
    case UnaryOp::Minus: return "-";
    case UnaryOp::Not: return "!";
    case UnaryOp::PreInc:
    case UnaryOp::PostInc: return "++";
    case UnaryOp::PreDec:
    case UnaryOp::PostDec: return "--";
  }
  return "?";
}

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

const char* to_string(AssignOp op) {
  switch (op) {
    case AssignOp::Assign: return "=";
    case AssignOp::Add: return "+=";
    case AssignOp::Sub: return "-=";
    case AssignOp::Mul: return "*=";
    case AssignOp::Div: return "/=";
    case AssignOp::Mod: return "%=";
  }
  return "?";
}

std::optional<BinaryOp> compound_binary(AssignOp op) {
  switch (op) {
    case AssignOp::Assign: return std::nullopt;
    case AssignOp::Add: return BinaryOp::Add;
    case AssignOp::Sub: return BinaryOp::Sub;
    case AssignOp::Mul: return BinaryOp::Mul;
    case AssignOp::Div: return BinaryOp::Div;
    case AssignOp::Mod: return BinaryOp::Mod;
  }
  return std::nullopt;
}

Expr make_expr(ExprNode node, SourcePos pos) { return Expr{pos, next_uid(), std::move(node)}; }

Stmt make_stmt(StmtNode node, SourcePos pos) { return Stmt{pos, next_uid(), std::move(node)}; }

namespace {

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string path) : toks_(std::move(tokens)), path_(std::move(path)) {}

  Ast unit() {
    Ast ast;
    ast.path = path_;
    if (is_kw("package")) {
      PackageDecl pkg;
      pkg.pos = cur().pos;
      ++i_;
      pkg.segments.push_back(expect_ident("package name"));
      while (accept(".")) pkg.segments.push_back(expect_ident("package name segment"));
      expect(";");
      ast.package = std::move(pkg);
    }
    while (cur().kind != TokenKind::End) ast.classes.push_back(class_decl());
    return ast;
  }

  Expr standalone_expression() {
    Expr e = expression();
    if (cur().kind != TokenKind::End) fail("end of expression");
    return e;
  }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& cur() const { return toks_[i_]; }
  const Token& look(std::size_t k) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }

  bool is_punct(const char* p) const { return cur().kind == TokenKind::Punct && cur().text == p; }
  bool is_kw(const char* k) const { return cur().kind == TokenKind::Keyword && cur().text == k; }
  static bool tok_is(const Token& t, TokenKind k, const char* s) { return t.kind == k && t.text == s; }

  bool accept(const char* p) {
    if (is_punct(p)) {
      ++i_;
      return true;
    }
    return false;
  }
  bool accept_kw(const char* k) {
    if (is_kw(k)) {
      ++i_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = cur();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(path_, t.pos, "expected " + expected + " but found " + found);
  }

  void expect(const char* p) {
    if (!accept(p)) fail(std::string("'") + p + "'");
  }
  void expect_kw(const char* k) {
    if (!accept_kw(k)) fail(std::string("'") + k + "'");
  }
  std::string expect_ident(const std::string& what) {
    if (cur().kind != TokenKind::Identifier) fail(what);
    return toks_[i_++].text;
  }

  static bool is_primitive_kw(const Token& t) { return t.kind == TokenKind::Keyword && is_primitive_name(t.text); }

  // ---- declarations ----------------------------------------------------------
  Modifiers modifiers() {
    Modifiers m;
    bool access = false;
    for (;;) {
      SourcePos p = cur().pos;
      auto set_access = [&](Access a) {
        if (access) throw ParseError(path_, p, "conflicting access modifiers");
        access = true;
        m.access = a;
      };
      if (accept_kw("public")) {
        set_access(Access::Public);
      } else if (accept_kw("private")) {
        set_access(Access::Private);
      } else if (accept_kw("protected")) {
        set_access(Access::Protected);
      } else if (is_kw("static") && !tok_is(look(1), TokenKind::Punct, "{")) {
        ++i_;
        m.isStatic = true;
      } else if (accept_kw("final")) {
        m.isFinal = true;
      } else if (accept_kw("synchronized")) {
        m.isSynchronized = true;
      } else {
        return m;
      }
    }
  }

  TypeRef type_ref(const char* what = "type") {
    TypeRef t;
    t.pos = cur().pos;
    if (is_primitive_kw(cur())) {
      t.name = toks_[i_++].text;
    } else if (cur().kind == TokenKind::Identifier) {
      t.name = toks_[i_++].text;
      while (is_punct(".") && look(1).kind == TokenKind::Identifier) {
        ++i_;
        t.qualifier.push_back(std::move(t.name));
        t.name = toks_[i_++].text;
      }
    } else {
      fail(what);
    }
    if (is_punct("[") && tok_is(look(1), TokenKind::Punct, "]")) {
      i_ += 2;
      t.array = true;
      if (is_punct("[")) throw ParseError(path_, cur().pos, "multi-dimensional arrays are not supported");
    }
    return t;
  }

  ClassDecl class_decl() {
    ClassDecl c;
    c.uid = next_uid();
    c.mods = modifiers();
    expect_kw("class");
    c.namePos = cur().pos;
    c.name = expect_ident("class name");
    if (accept_kw("extends")) c.superclass = type_ref("superclass name");
    expect("{");
    while (!is_punct("}")) {
      if (cur().kind == TokenKind::End) fail("'}' closing class " + c.name);
      if (accept(";")) continue;
      c.members.push_back(member(c.name));
    }
    expect("}");
    return c;
  }

  std::vector<Param> params() {
    std::vector<Param> ps;
    expect("(");
    if (!is_punct(")")) {
      do {
        Param p;
        p.uid = next_uid();
        p.isFinal = accept_kw("final");
        p.type = type_ref("parameter type");
        p.pos = cur().pos;
        p.name = expect_ident("parameter name");
        ps.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    return ps;
  }

  Member member(const std::string& className) {
    Member m;
    m.uid = next_uid();
    m.pos = cur().pos;
    if (is_kw("static") && tok_is(look(1), TokenKind::Punct, "{")) {
      ++i_;
      m.node = InitializerDecl{true, block()};
      return m;
    }
    if (is_punct("{")) {
      m.node = InitializerDecl{false, block()};
      return m;
    }
    Modifiers mods = modifiers();
    if (cur().kind == TokenKind::Identifier && cur().text == className && tok_is(look(1), TokenKind::Punct, "(")) {
      ConstructorDecl ctor;
      ctor.mods = mods;
      ctor.namePos = cur().pos;
      ctor.name = toks_[i_++].text;
      ctor.params = params();
      ctor.body = block();
      m.node = std::move(ctor);
      return m;
    }
    if (accept_kw("void")) {
      MethodDecl md;
      md.mods = mods;
      md.namePos = cur().pos;
      md.name = expect_ident("method name");
      md.params = params();
      md.body = block();
      m.node = std::move(md);
      return m;
    }
    TypeRef type = type_ref("member type");
    SourcePos namePos = cur().pos;
    std::string name = expect_ident("member name");
    if (is_punct("(")) {
      MethodDecl md;
      md.mods = mods;
      md.returnType = std::move(type);
      md.namePos = namePos;
      md.name = std::move(name);
      md.params = params();
      md.body = block();
      m.node = std::move(md);
      return m;
    }
    FieldDecl f;
    f.mods = mods;
    f.type = std::move(type);
    f.vars.push_back(declarator_rest(std::move(name), namePos));
    while (accept(",")) {
      SourcePos p = cur().pos;
      std::string n = expect_ident("field name");
      f.vars.push_back(declarator_rest(std::move(n), p));
    }
    expect(";");
    m.node = std::move(f);
    return m;
  }

  VarDeclarator declarator_rest(std::string name, SourcePos pos) {
    VarDeclarator v;
    v.uid = next_uid();
    v.name = std::move(name);
    v.pos = pos;
    if (accept("=")) {
      if (is_punct("{"))
        v.init = array_init();
      else
        v.init = expression();
    }
    return v;
  }

  Expr array_init() {
    SourcePos p = cur().pos;
    expect("{");
    ArrayInitExpr init;
    if (!is_punct("}")) {
      do {
        if (is_punct("}")) break;  // trailing comma
        init.elements.push_back(expression());
      } while (accept(","));
    }
    expect("}");
    return make_expr(std::move(init), p);
  }

  // ---- statements ------------------------------------------------------------
  Stmt block() {
    SourcePos p = cur().pos;
    expect("{");
    BlockStmt b;
    while (!is_punct("}")) {
      if (cur().kind == TokenKind::End) fail("'}'");
      b.stmts.push_back(statement());
    }
    expect("}");
    return make_stmt(std::move(b), p);
  }

  // Type followed by an identifier starts a local declaration.
  bool looks_like_local_decl() const {
    std::size_t k = i_;
    if (tok_is(toks_[k], TokenKind::Keyword, "final")) return true;
    if (is_primitive_kw(toks_[k])) return true;
    if (toks_[k].kind != TokenKind::Identifier) return false;
    ++k;
    while (tok_is(toks_[k], TokenKind::Punct, ".") && toks_[k + 1].kind == TokenKind::Identifier) k += 2;
    if (tok_is(toks_[k], TokenKind::Punct, "[") && tok_is(toks_[k + 1], TokenKind::Punct, "]")) k += 2;
    return toks_[k].kind == TokenKind::Identifier;
  }

  Stmt local_var(bool requireSemicolon) {
    SourcePos p = cur().pos;
    LocalVarStmt lv;
    lv.isFinal = accept_kw("final");
    lv.type = type_ref("variable type");
    do {
      SourcePos vp = cur().pos;
      std::string n = expect_ident("variable name");
      lv.vars.push_back(declarator_rest(std::move(n), vp));
    } while (accept(","));
    if (requireSemicolon) expect(";");
    return make_stmt(std::move(lv), p);
  }

  Stmt statement() {
    SourcePos p = cur().pos;
    if (is_punct("{")) return block();
    if (accept(";")) return make_stmt(EmptyStmt{}, p);
    if (cur().kind == TokenKind::Keyword) {
      const std::string& k = cur().text;
      if (k == "if") {
        ++i_;
        expect("(");
        Expr c = expression();
        expect(")");
        Stmt t = statement();
        IfStmt s{std::move(c), std::move(t), std::nullopt};
        if (accept_kw("else")) s.elseStmt = StmtBox(statement());
        return make_stmt(std::move(s), p);
      }
      if (k == "while") {
        ++i_;
        expect("(");
        Expr c = expression();
        expect(")");
        Stmt body = statement();
        return make_stmt(WhileStmt{std::move(c), std::move(body)}, p);
      }
      if (k == "do") {
        ++i_;
        Stmt body = statement();
        expect_kw("while");
        expect("(");
        Expr c = expression();
        expect(")");
        expect(";");
        return make_stmt(DoWhileStmt{std::move(body), std::move(c)}, p);
      }
      if (k == "for") return for_statement();
      if (k == "switch") return switch_statement();
      if (k == "return") {
        ++i_;
        ReturnStmt r;
        if (!is_punct(";")) r.value = expression();
        expect(";");
        return make_stmt(std::move(r), p);
      }
      if (k == "break") {
        ++i_;
        expect(";");
        return make_stmt(BreakStmt{}, p);
      }
      if (k == "continue") {
        ++i_;
        expect(";");
        return make_stmt(ContinueStmt{}, p);
      }
      if (k == "else") fail("statement ('else' without 'if')");
      if (k == "case" || k == "default") fail("statement ('" + k + "' outside switch)");
    }
    if (looks_like_local_decl()) return local_var(true);
    Expr e = expression();
    expect(";");
    return make_stmt(ExprStmt{std::move(e)}, p);
  }

  Stmt for_statement() {
    SourcePos p = cur().pos;
    expect_kw("for");
    expect("(");
    // enhanced for: [final] Type ID ':'
    {
      std::size_t save = i_;
      if (looks_like_local_decl()) {
        bool fin = accept_kw("final");
        TypeRef t = type_ref();
        if (cur().kind == TokenKind::Identifier && tok_is(look(1), TokenKind::Punct, ":")) {
          SourcePos vp = cur().pos;
          std::string v = toks_[i_++].text;
          expect(":");
          Expr it = expression();
          expect(")");
          Stmt body = statement();
          return make_stmt(ForEachStmt{fin, std::move(t), std::move(v), vp, std::move(it), std::move(body)}, p);
        }
      }
      i_ = save;
    }
    ForStmt f{{}, std::nullopt, {}, make_stmt(EmptyStmt{})};
    if (!is_punct(";")) {
      if (looks_like_local_decl()) {
        f.init.push_back(local_var(false));
      } else {
        do {
          SourcePos ep = cur().pos;
          f.init.push_back(make_stmt(ExprStmt{expression()}, ep));
        } while (accept(","));
      }
    }
    expect(";");
    if (!is_punct(";")) f.cond = expression();
    expect(";");
    if (!is_punct(")")) {
      do f.update.push_back(expression());
      while (accept(","));
    }
    expect(")");
    f.body = statement();
    return make_stmt(std::move(f), p);
  }

  Stmt switch_statement() {
    SourcePos p = cur().pos;
    expect_kw("switch");
    expect("(");
    Expr sel = expression();
    expect(")");
    expect("{");
    SwitchStmt s{std::move(sel), {}};
    bool sawDefault = false;
    while (!is_punct("}")) {
      SwitchCase c;
      if (accept_kw("case")) {
        c.label = expression();
      } else if (is_kw("default")) {
        if (sawDefault) throw ParseError(path_, cur().pos, "duplicate default label");
        ++i_;
        sawDefault = true;
      } else {
        fail("'case', 'default' or '}'");
      }
      expect(":");
      while (!is_kw("case") && !is_kw("default") && !is_punct("}")) {
        if (cur().kind == TokenKind::End) fail("'}'");
        c.body.push_back(statement());
      }
      s.cases.push_back(std::move(c));
    }
    expect("}");
    return make_stmt(std::move(s), p);
  }

  // ---- expressions -------------------------------------------------------------
  Expr expression() { return assignment(); }

  Expr assignment() {
    Expr lhs = conditional();
    static const std::pair<const char*, AssignOp> kOps[] = {
        {"=", AssignOp::Assign}, {"+=", AssignOp::Add}, {"-=", AssignOp::Sub},
        {"*=", AssignOp::Mul},   {"/=", AssignOp::Div}, {"%=", AssignOp::Mod},
    };
    for (const auto& [tok, op] : kOps) {
      if (is_punct(tok)) {
        SourcePos p = cur().pos;
        if (!lhs.is<NameExpr>() && !lhs.is<FieldAccessExpr>() && !lhs.is<ArrayAccessExpr>())
          throw ParseError(path_, p, "invalid assignment target");
        ++i_;
        Expr rhs = assignment();
        SourcePos lp = lhs.pos;
        return make_expr(AssignExpr{op, std::move(lhs), std::move(rhs)}, lp);
      }
    }
    return lhs;
  }

  Expr conditional() {
    Expr c = binary(0);
    if (accept("?")) {
      Expr t = expression();
      expect(":");
      Expr e = conditional();
      SourcePos p = c.pos;
      return make_expr(ConditionalExpr{std::move(c), std::move(t), std::move(e)}, p);
    }
    return c;
  }

  Expr binary(int level) {
    static const std::vector<std::vector<std::pair<const char*, BinaryOp>>> kLevels = {
        {{"||", BinaryOp::Or}},
        {{"&&", BinaryOp::And}},
        {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}},
        {{"<", BinaryOp::Lt}, {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}},
        {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}},
        {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}},
    };
    if (level == static_cast<int>(kLevels.size())) return unary();
    Expr lhs = binary(level + 1);
    for (;;) {
      bool matched = false;
      for (const auto& [tok, op] : kLevels[level]) {
        if (is_punct(tok)) {
          ++i_;
          Expr rhs = binary(level + 1);
          SourcePos p = lhs.pos;
          lhs = make_expr(BinaryExpr{op, std::move(lhs), std::move(rhs)}, p);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  Expr unary() {
    SourcePos p = cur().pos;
    if (accept("+")) return make_expr(UnaryExpr{UnaryOp::Plus, unary()}, p);
    if (accept("-")) return make_expr(UnaryExpr{UnaryOp::Minus, unary()}, p);
    if (accept("!")) return make_expr(UnaryExpr{UnaryOp::Not, unary()}, p);
    if (accept("++")) return make_expr(UnaryExpr{UnaryOp::PreInc, check_target(unary())}, p);
    if (accept("--")) return make_expr(UnaryExpr{UnaryOp::PreDec, check_target(unary())}, p);
    // primitive cast: '(' primitive ['[' ']'] ')'
    if (is_punct("(") && is_primitive_kw(look(1)) && tok_is(look(2), TokenKind::Punct, ")")) {
      ++i_;
      TypeRef t = type_ref();
      expect(")");
      return make_expr(CastExpr{std::move(t), unary()}, p);
    }
    return postfix(primary());
  }

  Expr check_target(Expr e) {
    if (!e.is<NameExpr>() && !e.is<FieldAccessExpr>() && !e.is<ArrayAccessExpr>())
      throw ParseError(path_, e.pos, "invalid increment/decrement target");
    return e;
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    expect("(");
    if (!is_punct(")")) {
      do args.push_back(expression());
      while (accept(","));
    }
    expect(")");
    return args;
  }

  Expr postfix(Expr e) {
    for (;;) {
      SourcePos p = e.pos;
      if (accept(".")) {
        SourcePos np = cur().pos;
        std::string name = expect_ident("member name after '.'");
        if (is_punct("(")) {
          std::vector<Expr> args = arguments();
          e = make_expr(CallExpr{ExprBox(std::move(e)), std::move(name), np, std::move(args)}, p);
        } else {
          e = make_expr(FieldAccessExpr{std::move(e), std::move(name), np}, p);
        }
      } else if (accept("[")) {
        Expr idx = expression();
        expect("]");
        e = make_expr(ArrayAccessExpr{std::move(e), std::move(idx)}, p);
      } else if (is_punct("++")) {
        ++i_;
        e = make_expr(UnaryExpr{UnaryOp::PostInc, check_target(std::move(e))}, p);
      } else if (is_punct("--")) {
        ++i_;
        e = make_expr(UnaryExpr{UnaryOp::PostDec, check_target(std::move(e))}, p);
      } else {
        return e;
      }
    }
  }

  Expr primary() {
    const Token& t = cur();
    SourcePos p = t.pos;
    auto lit = [&](LiteralKind k) {
      Literal l{k, t.text};
      ++i_;
      return make_expr(LiteralExpr{std::move(l)}, p);
    };
    switch (t.kind) {
      case TokenKind::IntLiteral: return lit(LiteralKind::Int);
      case TokenKind::LongLiteral: return lit(LiteralKind::Long);
      case TokenKind::FloatLiteral: return lit(LiteralKind::Float);
      case TokenKind::DoubleLiteral: return lit(LiteralKind::Double);
      case TokenKind::CharLiteral: return lit(LiteralKind::Char);
      case TokenKind::StringLiteral: return lit(LiteralKind::String);
      case TokenKind::Identifier: {
        std::string name = t.text;
        ++i_;
        if (is_punct("(")) {
          std::vector<Expr> args = arguments();
          return make_expr(CallExpr{std::nullopt, std::move(name), p, std::move(args)}, p);
        }
        return make_expr(NameExpr{std::move(name)}, p);
      }
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false") return lit(LiteralKind::Boolean);
        if (t.text == "null") return lit(LiteralKind::Null);
        if (t.text == "this") {
          ++i_;
          return make_expr(ThisExpr{}, p);
        }
        if (t.text == "new") return creation();
        break;
      case TokenKind::Punct:
        if (t.text == "(") {
          ++i_;
          Expr inner = expression();
          expect(")");
          return make_expr(ParenExpr{std::move(inner)}, p);
        }
        break;
      default:
        break;
    }
    fail("expression");
  }

  Expr creation() {
    SourcePos p = cur().pos;
    expect_kw("new");
    TypeRef t;
    t.pos = cur().pos;
    if (is_primitive_kw(cur())) {
      t.name = toks_[i_++].text;
    } else if (cur().kind == TokenKind::Identifier) {
      t.name = toks_[i_++].text;
      while (is_punct(".") && look(1).kind == TokenKind::Identifier) {
        ++i_;
        t.qualifier.push_back(std::move(t.name));
        t.name = toks_[i_++].text;
      }
    } else {
      fail("type after 'new'");
    }
    if (accept("[")) {
      NewArrayExpr na{std::move(t), std::nullopt, std::nullopt};
      if (accept("]")) {
        if (!is_punct("{")) fail("array initializer");
        Expr init = array_init();
        na.init = std::move(*init.as<ArrayInitExpr>());
      } else {
        na.size = ExprBox(expression());
        expect("]");
      }
      if (is_punct("[")) throw ParseError(path_, cur().pos, "multi-dimensional arrays are not supported");
      return make_expr(std::move(na), p);
    }
    if (t.is_primitive()) fail("'[' after primitive type in array creation");
    std::vector<Expr> args = arguments();
    return make_expr(NewObjectExpr{std::move(t), std::move(args)}, p);
  }

  std::vector<Token> toks_;
  std::string path_;
  std::size_t i_ = 0;
};

}  // namespace

Ast parse_unit(const SourceUnit& unit) {
  bool blank = true;
  for (char c : unit.text)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) throw ParseError(unit.path, SourcePos{1, 1}, "empty source unit");
  Parser p(tokenize(unit.text, unit.path), unit.path);
  return p.unit();
}

Expr parse_expression(const std::string& text) {
  Parser p(tokenize(text, "<expr>"), "<expr>");
  return p.standalone_expression();
}

}  // namespace bsim::frontend
