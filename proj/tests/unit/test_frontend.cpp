#include <gtest/gtest.h>

#include "bsim/frontend/lexer.hpp"
#include "bsim/frontend/parser.hpp"
#include "bsim/frontend/printer.hpp"
#include "bsim/frontend/resolver.hpp"
#include "test_util.hpp"

using namespace bsim::frontend;
using bsim::testsupport::corpus_programs;
using bsim::testsupport::one_unit;
using bsim::testsupport::slurp;
using bsim::testsupport::source_dir;

namespace {

std::string hashpass() { return slurp(source_dir() / "corpus" / "samples" / "hashpass" / "Main.src"); }

}  // namespace

TEST(Lexer, ClassifiesTokens) {
  auto toks = tokenize("int x = 42L + 3.5f * 'c'; // tail\n\"s\\n\" /* block */ while", "t.src");
  std::vector<TokenKind> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  std::vector<TokenKind> want{TokenKind::Keyword,     TokenKind::Identifier, TokenKind::Punct,
                              TokenKind::LongLiteral, TokenKind::Punct,      TokenKind::FloatLiteral,
                              TokenKind::Punct,       TokenKind::CharLiteral, TokenKind::Punct,
                              TokenKind::StringLiteral, TokenKind::Keyword,  TokenKind::End};
  EXPECT_EQ(kinds, want);
  EXPECT_EQ(toks[3].text, "42L");
}

TEST(Lexer, TracksPositions) {
  auto toks = tokenize("class A {\n  int x;\n}", "t.src");
  ASSERT_GE(toks.size(), 5u);
  EXPECT_EQ(toks[0].pos, (SourcePos{1, 1}));
  EXPECT_EQ(toks[3].text, "int");
  EXPECT_EQ(toks[3].pos, (SourcePos{2, 3}));
}

TEST(Lexer, DecodesEscapes) {
  EXPECT_EQ(decode_string_literal("\"a\\tb\\\"\""), "a\tb\"");
  EXPECT_EQ(decode_char_literal("'\\n'"), U'\n');
}

TEST(Lexer, RejectsUnterminatedString) { EXPECT_THROW(tokenize("String s = \"open;", "t.src"), ParseError); }

TEST(Parser, HashPasswordStructure) {
  Ast ast = parse_unit({"Main.src", hashpass()});
  ASSERT_EQ(ast.classes.size(), 2u);
  EXPECT_EQ(ast.classes[0].name, "User");
  EXPECT_EQ(ast.classes[0].members.size(), 4u);
  const auto* m = ast.classes[1].members[0].as<MethodDecl>();
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->name, "hashPassword");
  EXPECT_TRUE(m->mods.isStatic);
  ASSERT_EQ(m->params.size(), 2u);
  EXPECT_EQ(m->params[1].type.name, "HashFunction");
}

TEST(Parser, ReportsPositionOfError) {
  try {
    parse_unit({"bad.src", "class A {\n  void f() {\n    int x = 1\n  }\n}\n"});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "bad.src");
    EXPECT_EQ(e.pos().line, 4);
  }
}

TEST(Parser, NeverReturnsPartialTree) {
  EXPECT_THROW(parse_unit({"x.src", "class A { void f() { if (x) } }"}), ParseError);
  EXPECT_THROW(parse_unit({"x.src", "class { }"}), ParseError);
}

TEST(Parser, ExpressionPrecedence) {
  Expr e = parse_expression("a + b * c - d");
  const auto* sub = e.as<BinaryExpr>();
  ASSERT_NE(sub, nullptr);
  EXPECT_EQ(sub->op, BinaryOp::Sub);
  const auto* add = sub->lhs->as<BinaryExpr>();
  ASSERT_NE(add, nullptr);
  EXPECT_EQ(add->op, BinaryOp::Add);
  EXPECT_EQ(add->rhs->as<BinaryExpr>()->op, BinaryOp::Mul);
}

TEST(Parser, ConditionalAndLogical) {
  Expr e = parse_expression("x > 0 && y < 2 || z ? 1 : 2");
  const auto* c = e.as<ConditionalExpr>();
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->cond->as<BinaryExpr>()->op, BinaryOp::Or);
}

TEST(Printer, RoundTripsCorpusInEveryStyle) {
  std::vector<PrintStyle> styles(4);
  styles[1].braceOnNewLine = true;
  styles[2].spaceAroundOperators = false;
  styles[2].indent = "\t";
  styles[3].spaceAfterKeyword = false;
  styles[3].blankLineBetweenMembers = false;
  for (const auto& sub : corpus_programs())
    for (const auto& u : sub.units) {
      Ast a = parse_unit(u);
      std::string canonical = print_unit(a);
      for (const auto& st : styles) {
        std::string text = print_unit(a, st);
        Ast b = parse_unit({u.path, text});
        EXPECT_EQ(print_unit(b), canonical) << sub.id;
      }
    }
}

TEST(Printer, ParenthesisesByPrecedence) {
  Expr e = parse_expression("(a + b) * c");
  EXPECT_EQ(print_expr(e), "(a + b) * c");
  Expr f = parse_expression("a - (b - c)");
  EXPECT_EQ(print_expr(f), "a - (b - c)");
}

TEST(Resolver, HashPasswordBoundary) {
  auto p = resolve_program(one_unit(hashpass()), std::string("hashPassword"));
  EXPECT_EQ(p.apiBoundary, (std::set<std::string>{"HashFunction"}));
  ASSERT_EQ(p.entryPoints.size(), 1u);
  EXPECT_EQ(p.signature(p.entryPoints[0]), "Main.hashPassword(User,HashFunction)");
}

TEST(Resolver, EntryDefaultsToMain) {
  auto p = resolve_program(one_unit("class A { public static void main(String[] a) { } static void g() { } }"));
  ASSERT_EQ(p.entryPoints.size(), 1u);
  EXPECT_EQ(p.method(p.entryPoints[0]).name, "main");
}

TEST(Resolver, QualifiedEntry) {
  std::string src = "class A { static void run() { } }\nclass B { static void run() { } }";
  auto p = resolve_program(one_unit(src), std::string("B.run"));
  ASSERT_EQ(p.entryPoints.size(), 1u);
  EXPECT_EQ(p.classes[p.entryPoints[0].cls].name, "B");
  auto both = resolve_program(one_unit(src), std::string("run"));
  EXPECT_EQ(both.entryPoints.size(), 2u);
  EXPECT_THROW(resolve_program(one_unit(src), std::string("C.run")), ResolveError);
}

TEST(Resolver, MissingEntryIsWarning) {
  auto p = resolve_program(one_unit("class A { void f() { } }"));
  EXPECT_TRUE(p.entryPoints.empty());
  EXPECT_FALSE(p.warnings.empty());
}

TEST(Resolver, InheritedLookup) {
  std::string src = slurp(source_dir() / "corpus" / "programs" / "shapes.src");
  auto p = resolve_program(one_unit(src));
  int rect = p.find_class("Rect");
  int shape = p.find_class("Shape");
  ASSERT_GE(rect, 0);
  EXPECT_TRUE(p.is_subclass(rect, shape));
  MethodRef d = p.find_method(rect, "describe", 0);
  EXPECT_EQ(d.cls, shape);
  MethodRef a = p.find_method(rect, "area", 0);
  EXPECT_EQ(a.cls, rect);
  EXPECT_EQ(p.find_field(rect, "name").first, shape);
}

TEST(Resolver, RejectsBadHierarchies) {
  EXPECT_THROW(resolve_program(one_unit("class A extends B { } class B extends A { }")), ResolveError);
  EXPECT_THROW(resolve_program(one_unit("class A { } class A { }")), ResolveError);
  EXPECT_THROW(resolve_program(one_unit("class A { int x; int x; }")), ResolveError);
}

TEST(Resolver, WholeCorpusResolves) {
  auto subs = corpus_programs();
  EXPECT_EQ(subs.size(), 20u);
  for (const auto& s : subs) {
    auto p = resolve_program(s.units);
    EXPECT_EQ(p.entryPoints.size(), 1u) << s.id;
  }
}
