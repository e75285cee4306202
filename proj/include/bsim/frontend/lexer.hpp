#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bsim/frontend/ast.hpp"

namespace bsim::frontend {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, SourcePos pos, std::string message);

  const std::string& path() const { return path_; }
  SourcePos pos() const { return pos_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string path_;
  SourcePos pos_;
  std::string detail_;
};

enum class TokenKind {
  Identifier,
  Keyword,
  IntLiteral,
  LongLiteral,
  FloatLiteral,
  DoubleLiteral,
  CharLiteral,
  StringLiteral,
  Punct,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourcePos pos;
};

bool is_keyword(std::string_view word);

// Splits source text into tokens; comments and whitespace are dropped.
std::vector<Token> tokenize(std::string_view text, const std::string& path);

// Decoding helpers for literal spellings.
std::string decode_string_literal(std::string_view spelling);
char32_t decode_char_literal(std::string_view spelling);

}  // namespace bsim::frontend
