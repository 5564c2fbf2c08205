#include "darkworlds/bugs/parser.hpp"

#include <string>
#include <utility>

namespace darkworlds::bugs {

namespace {

class Parser {
public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

  ModelAst model() {
    expect(TokenKind::KwModel, "'model'");
    expect(TokenKind::LBrace, "'{' after 'model'");
    ModelAst ast;
    ast.statements = block_body();
    if (!at(TokenKind::End)) fail("unexpected " + describe(peek()) + " after model block");
    return ast;
  }

private:
  const Token& peek() const {
    if (i_ < toks_.size()) return toks_[i_];
    return end_token();
  }

  const Token& end_token() const {
    if (!end_init_) {
      end_.kind = TokenKind::End;
      if (!toks_.empty()) {
        end_.pos = toks_.back().pos;
        end_.pos.column += static_cast<int>(toks_.back().text.size());
      }
      end_init_ = true;
    }
    return end_;
  }

  bool at(TokenKind k) const { return peek().kind == k; }

  const Token& take() {
    const Token& t = peek();
    if (i_ < toks_.size()) ++i_;
    return t;
  }

  bool accept(TokenKind k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  const Token& expect(TokenKind k, const std::string& what) {
    if (!at(k)) fail(what + " expected, found " + describe(peek()));
    return take();
  }

  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }

  // Statements up to and including the closing brace.
  std::vector<Statement> block_body() {
    std::vector<Statement> out;
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::End)) fail("unbalanced braces: '}' expected");
      out.push_back(statement());
      while (accept(TokenKind::Semicolon)) {
      }
    }
    take();
    return out;
  }

  Statement statement() {
    if (at(TokenKind::KwFor)) return for_loop();
    if (!at(TokenKind::Identifier)) fail("statement expected, found " + describe(peek()));
    Statement s;
    s.pos = peek().pos;
    s.lhs = reference(false);
    if (accept(TokenKind::LeftArrow)) {
      s.kind = Statement::Kind::Deterministic;
      s.rhs = expression();
    } else if (accept(TokenKind::Tilde)) {
      s.kind = Statement::Kind::Stochastic;
      const Token& name = expect(TokenKind::Identifier, "distribution name");
      if (!dist_from_name(name.text, s.dist))
        throw ParseError("unknown distribution '" + name.text + "'", name.pos);
      expect(TokenKind::LParen, "'('");
      s.dist_args = arguments(false);
      if (s.dist_args.size() != 2)
        throw ParseError(name.text + " takes 2 parameters, got " +
                             std::to_string(s.dist_args.size()),
                         name.pos);
    } else {
      fail("'<-' or '~' expected, found " + describe(peek()));
    }
    return s;
  }

  Statement for_loop() {
    Statement s;
    s.kind = Statement::Kind::For;
    s.pos = take().pos;
    expect(TokenKind::LParen, "'(' after 'for'");
    s.index_var = expect(TokenKind::Identifier, "loop index").text;
    expect(TokenKind::KwIn, "'in'");
    s.lo = expression();
    expect(TokenKind::Colon, "':'");
    s.hi = expression();
    expect(TokenKind::RParen, "')'");
    expect(TokenKind::LBrace, "'{'");
    s.body = block_body();
    return s;
  }

  // Comma separated expressions after an already consumed '('.
  std::vector<Expr> arguments(bool allow_slice) {
    std::vector<Expr> args;
    if (accept(TokenKind::RParen)) return args;
    do {
      args.push_back(allow_slice && at(TokenKind::Identifier) ? slice_or_expr() : expression());
    } while (accept(TokenKind::Comma));
    expect(TokenKind::RParen, "')'");
    return args;
  }

  // Inside sum(): a bare subscripted reference may contain slices.
  Expr slice_or_expr() {
    const std::size_t save = i_;
    Expr ref = reference(true);
    if (at(TokenKind::Comma) || at(TokenKind::RParen)) return ref;
    i_ = save;
    return expression();
  }

  Expr reference(bool allow_slice) {
    const Token& name = expect(TokenKind::Identifier, "identifier");
    std::vector<Expr> subs;
    bool has_slice = false;
    if (accept(TokenKind::LBracket)) {
      while (true) {
        if (at(TokenKind::Comma) || at(TokenKind::RBracket)) {
          subs.push_back(Expr::slice(peek().pos));
          has_slice = true;
        } else {
          subs.push_back(expression());
        }
        if (accept(TokenKind::RBracket)) break;
        expect(TokenKind::Comma, "',' or ']'");
      }
    }
    if (has_slice && !allow_slice)
      throw ParseError("empty subscript is only allowed inside sum()", name.pos);
    return Expr::ref(name.text, std::move(subs), name.pos);
  }

  Expr expression() {
    Expr lhs = term();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      const Token& op = take();
      Expr rhs = term();
      lhs = Expr::binary(op.text[0], std::move(lhs), std::move(rhs), op.pos);
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (at(TokenKind::Star) || at(TokenKind::Slash)) {
      const Token& op = take();
      Expr rhs = unary();
      lhs = Expr::binary(op.text[0], std::move(lhs), std::move(rhs), op.pos);
    }
    return lhs;
  }

  Expr unary() {
    if (at(TokenKind::Minus)) {
      const SourcePos p = take().pos;
      return Expr::neg(unary(), p);
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: take(); return Expr::number(t.number, t.pos);
      case TokenKind::LParen: {
        take();
        Expr inner = expression();
        expect(TokenKind::RParen, "')'");
        return inner;
      }
      case TokenKind::Identifier: {
        if (i_ + 1 < toks_.size() && toks_[i_ + 1].kind == TokenKind::LParen) return call();
        return reference(false);
      }
      default: fail("expression expected, found " + describe(t));
    }
  }

  Expr call() {
    const Token& name = take();
    Builtin fn;
    if (!builtin_from_name(name.text, fn))
      throw ParseError("unknown function '" + name.text + "'", name.pos);
    take();  // '('
    std::vector<Expr> args = arguments(fn == Builtin::Sum);
    const int arity = builtin_arity(fn);
    if (arity >= 0 && static_cast<int>(args.size()) != arity)
      throw ParseError(name.text + "() takes " + std::to_string(arity) + " argument(s), got " +
                           std::to_string(args.size()),
                       name.pos);
    if (arity < 0 && args.empty())
      throw ParseError(name.text + "() needs at least one argument", name.pos);
    return Expr::call(fn, std::move(args), name.pos);
  }

  std::span<const Token> toks_;
  std::size_t i_ = 0;
  mutable Token end_{TokenKind::End, "", {}};
  mutable bool end_init_ = false;
};

}  // namespace

ModelAst parse(std::span<const Token> tokens) { return Parser(tokens).model(); }

ModelAst parse_source(std::string_view source) {
  const std::vector<Token> tokens = tokenize(source);
  return parse(tokens);
}

}  // namespace darkworlds::bugs
