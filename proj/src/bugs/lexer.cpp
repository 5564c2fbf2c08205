#include "darkworlds/bugs/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace darkworlds::bugs {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::KwModel: return "'model'";
    case TokenKind::KwFor: return "'for'";
    case TokenKind::KwIn: return "'in'";
    case TokenKind::Tilde: return "'~'";
    case TokenKind::LeftArrow: return "'<-'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      if (at_end()) break;
      out.push_back(next());
    }
    return out;
  }

private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }
  SourcePos here() const { return {line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_blank() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token simple(TokenKind kind, std::size_t len) {
    Token t{kind, std::string(src_.substr(i_, len)), here()};
    for (std::size_t k = 0; k < len; ++k) advance();
    return t;
  }

  Token next() {
    const char c = peek();
    if (is_ident_start(c)) return identifier();
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) return number();
    switch (c) {
      case '~': return simple(TokenKind::Tilde, 1);
      case '<':
        if (peek(1) == '-') return simple(TokenKind::LeftArrow, 2);
        break;
      case ',': return simple(TokenKind::Comma, 1);
      case ':': return simple(TokenKind::Colon, 1);
      case ';': return simple(TokenKind::Semicolon, 1);
      case '(': return simple(TokenKind::LParen, 1);
      case ')': return simple(TokenKind::RParen, 1);
      case '{': return simple(TokenKind::LBrace, 1);
      case '}': return simple(TokenKind::RBrace, 1);
      case '[': return simple(TokenKind::LBracket, 1);
      case ']': return simple(TokenKind::RBracket, 1);
      case '+': return simple(TokenKind::Plus, 1);
      case '-': return simple(TokenKind::Minus, 1);
      case '*': return simple(TokenKind::Star, 1);
      case '/': return simple(TokenKind::Slash, 1);
      default: break;
    }
    throw LexError(std::string("invalid character '") + c + "'", here());
  }

  Token identifier() {
    const SourcePos start = here();
    const std::size_t begin = i_;
    while (!at_end() && is_ident_char(peek())) advance();
    std::string text(src_.substr(begin, i_ - begin));
    TokenKind kind = TokenKind::Identifier;
    if (text == "model") kind = TokenKind::KwModel;
    else if (text == "for") kind = TokenKind::KwFor;
    else if (text == "in") kind = TokenKind::KwIn;
    return {kind, std::move(text), start};
  }

  // digits [. digits] [(e|E) [+-] digits]; a trailing letter, digit
  // or dot glued to the literal is reported at its own column.
  Token number() {
    const SourcePos start = here();
    const std::size_t begin = i_;
    while (is_digit(peek())) advance();
    if (peek() == '.') {
      advance();
      if (!is_digit(peek())) throw LexError("malformed number", here());
      while (is_digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      const bool has_sign = peek(1) == '+' || peek(1) == '-';
      if (is_digit(peek(has_sign ? 2 : 1))) {
        advance();
        if (has_sign) advance();
        while (is_digit(peek())) advance();
      }
    }
    if (is_ident_char(peek()) || peek() == '.') throw LexError("malformed number", here());
    const std::string_view text = src_.substr(begin, i_ - begin);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
      throw LexError("malformed number", start);
    Token t{TokenKind::Number, std::string(text), start};
    t.number = value;
    return t;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace darkworlds::bugs
