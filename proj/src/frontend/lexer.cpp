#include "bsim/frontend/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace bsim::frontend {

namespace {

constexpr std::array kKeywords = {
    "boolean", "break",   "byte",      "case",   "char",  "class",   "continue", "default",
    "do",      "double",  "else",      "extends", "false", "final",  "float",    "for",
    "if",      "int",     "long",      "new",    "null",  "package", "private",  "protected",
    "public",  "return",  "short",     "static", "switch", "synchronized", "this", "true",
    "void",    "while",
};

// Longest match first.
constexpr std::array kPuncts = {
    "++", "--", "+=", "-=", "*=", "/=", "%=", "&&", "||", "==", "!=", "<=", ">=",
    "+",  "-",  "*",  "/",  "%",  "<",  ">",  "=",  "!",  "?",  ":",  ";",  ",",
    ".",  "(",  ")",  "{",  "}",  "[",  "]",
};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& path) : text_(text), path_(path) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (at_end()) break;
      out.push_back(next());
    }
    out.push_back(Token{TokenKind::End, "", pos()});
    return out;
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < text_.size() ? text_[i_ + k] : '\0'; }
  SourcePos pos() const { return SourcePos{line_, col_}; }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  [[noreturn]] void fail(SourcePos p, const std::string& msg) const { throw ParseError(path_, p, msg); }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        SourcePos start = pos();
        advance();
        advance();
        while (!at_end() && !(peek() == '*' && peek(1) == '/')) advance();
        if (at_end()) fail(start, "unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    SourcePos start = pos();
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t b = i_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '$'))
        advance();
      std::string word(text_.substr(b, i_ - b));
      return Token{is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, word, start};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return number(start);
    if (c == '"') return quoted('"', TokenKind::StringLiteral, start);
    if (c == '\'') return quoted('\'', TokenKind::CharLiteral, start);
    for (std::string_view p : kPuncts) {
      if (text_.substr(i_, p.size()) == p) {
        for (std::size_t k = 0; k < p.size(); ++k) advance();
        return Token{TokenKind::Punct, std::string(p), start};
      }
    }
    fail(start, std::string("unexpected character '") + c + "'");
  }

  Token number(SourcePos start) {
    std::size_t b = i_;
    bool isFloat = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      if (!std::isxdigit(static_cast<unsigned char>(peek()))) fail(start, "malformed hexadecimal literal");
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        isFloat = true;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      } else if (peek() == '.' && !std::isalpha(static_cast<unsigned char>(peek(1)))) {
        // "1." is a valid double spelling
        isFloat = true;
        advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        isFloat = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(start, "malformed exponent");
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    TokenKind kind = isFloat ? TokenKind::DoubleLiteral : TokenKind::IntLiteral;
    char s = peek();
    if (s == 'L' || s == 'l') {
      if (isFloat) fail(start, "malformed long literal");
      kind = TokenKind::LongLiteral;
      advance();
    } else if (s == 'f' || s == 'F') {
      kind = TokenKind::FloatLiteral;
      advance();
    } else if (s == 'd' || s == 'D') {
      kind = TokenKind::DoubleLiteral;
      advance();
    }
    if (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') fail(start, "malformed numeric literal");
    return Token{kind, std::string(text_.substr(b, i_ - b)), start};
  }

  Token quoted(char quote, TokenKind kind, SourcePos start) {
    std::size_t b = i_;
    advance();
    while (!at_end() && peek() != quote) {
      if (peek() == '\n') fail(start, "unterminated literal");
      if (peek() == '\\') advance();
      if (!at_end()) advance();
    }
    if (at_end()) fail(start, "unterminated literal");
    advance();
    std::string spelling(text_.substr(b, i_ - b));
    if (kind == TokenKind::CharLiteral) {
      try {
        (void)decode_char_literal(spelling);
      } catch (const std::invalid_argument& e) {
        fail(start, e.what());
      }
    }
    return Token{kind, spelling, start};
  }

  std::string_view text_;
  const std::string& path_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes the body between the quotes; returns code points.
std::u32string decode_body(std::string_view body) {
  std::u32string out;
  for (std::size_t i = 0; i < body.size();) {
    unsigned char c = static_cast<unsigned char>(body[i]);
    if (c == '\\') {
      if (i + 1 >= body.size()) throw std::invalid_argument("dangling escape");
      char e = body[i + 1];
      i += 2;
      switch (e) {
        case 'n': out.push_back(U'\n'); break;
        case 't': out.push_back(U'\t'); break;
        case 'r': out.push_back(U'\r'); break;
        case 'b': out.push_back(U'\b'); break;
        case 'f': out.push_back(U'\f'); break;
        case '0': out.push_back(U'\0'); break;
        case '\\': out.push_back(U'\\'); break;
        case '\'': out.push_back(U'\''); break;
        case '"': out.push_back(U'"'); break;
        case 'u': {
          if (i + 4 > body.size()) throw std::invalid_argument("malformed unicode escape");
          char32_t v = 0;
          for (int k = 0; k < 4; ++k) {
            char h = body[i + k];
            if (!std::isxdigit(static_cast<unsigned char>(h))) throw std::invalid_argument("malformed unicode escape");
            v = v * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                         : (std::tolower(h) - 'a' + 10));
          }
          i += 4;
          out.push_back(v);
          break;
        }
        default:
          throw std::invalid_argument(std::string("unknown escape \\") + e);
      }
      continue;
    }
    // UTF-8 decode
    char32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      cp = c & 0x0F;
      extra = 2;
    } else {
      cp = c & 0x07;
      extra = 3;
    }
    ++i;
    for (int k = 0; k < extra && i < body.size(); ++k, ++i)
      cp = (cp << 6) | (static_cast<unsigned char>(body[i]) & 0x3F);
    out.push_back(cp);
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::string path, SourcePos pos, std::string message)
    : std::runtime_error(path + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      path_(std::move(path)),
      pos_(pos),
      detail_(std::move(message)) {}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view text, const std::string& path) { return Lexer(text, path).run(); }

std::string decode_string_literal(std::string_view spelling) {
  std::u32string cps = decode_body(spelling.substr(1, spelling.size() - 2));
  std::string out;
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

char32_t decode_char_literal(std::string_view spelling) {
  if (spelling.size() < 3) throw std::invalid_argument("empty character literal");
  std::u32string cps = decode_body(spelling.substr(1, spelling.size() - 2));
  if (cps.size() != 1) throw std::invalid_argument("character literal must hold exactly one character");
  return cps[0];
}

}  // namespace bsim::frontend
