#ifndef DARKWORLDS_BUGS_PARSER_HPP
#define DARKWORLDS_BUGS_PARSER_HPP

#include <span>
#include <string_view>

#include "darkworlds/bugs/ast.hpp"
#include "darkworlds/bugs/lexer.hpp"

namespace darkworlds::bugs {

/// Recursive-descent parser for the model language.
///
///   model     := 'model' '{' stmt* '}'
///   stmt      := for | ref ('<-' expr | '~' dist) [';']
///   for       := 'for' '(' ident 'in' expr ':' expr ')' '{' stmt* '}'
///   dist      := ('dnorm' | 'dgamma' | 'dunif') '(' expr ',' expr ')'
///   expr      := term (('+' | '-') term)*
///   term      := unary (('*' | '/') unary)*
///   unary     := '-' unary | primary
///   primary   := number | ref | builtin '(' args ')' | '(' expr ')'
///   ref       := ident ['[' [expr] (',' [expr])* ']']
///
/// An empty subscript is a slice and is only accepted inside sum().
ModelAst parse(std::span<const Token> tokens);

/// tokenize + parse.
ModelAst parse_source(std::string_view source);

}  // namespace darkworlds::bugs

#endif  // DARKWORLDS_BUGS_PARSER_HPP
