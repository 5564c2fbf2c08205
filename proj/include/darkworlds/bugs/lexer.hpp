#ifndef DARKWORLDS_BUGS_LEXER_HPP
#define DARKWORLDS_BUGS_LEXER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "darkworlds/error.hpp"

namespace darkworlds::bugs {

enum class TokenKind {
  Identifier,
  Number,
  KwModel,
  KwFor,
  KwIn,
  Tilde,      // ~
  LeftArrow,  // <-
  Comma,
  Colon,
  Semicolon,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Plus,
  Minus,
  Star,
  Slash,
  End,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  SourcePos pos;
  double number = 0.0;  ///< parsed value for Number tokens
};

/// Splits model source into tokens. Whitespace and `#` comments are
/// dropped; no End token is appended.
std::vector<Token> tokenize(std::string_view source);

}  // namespace darkworlds::bugs

#endif  // DARKWORLDS_BUGS_LEXER_HPP
