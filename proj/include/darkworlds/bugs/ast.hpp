#ifndef DARKWORLDS_BUGS_AST_HPP
#define DARKWORLDS_BUGS_AST_HPP

#include <string>
#include <string_view>
#include <vector>

#include "darkworlds/error.hpp"

namespace darkworlds::bugs {

enum class Builtin { Sqrt, Atan2, Cos, Sin, Sum, Exp };

/// Name lookup; returns false for unknown names.
bool builtin_from_name(std::string_view name, Builtin& out);
std::string_view builtin_name(Builtin b);
int builtin_arity(Builtin b);

enum class DistKind { Normal, Gamma, Uniform };

bool dist_from_name(std::string_view name, DistKind& out);
std::string_view dist_name(DistKind d);

struct Expr {
  enum class Kind {
    Number,  ///< value
    Ref,     ///< name with optional subscripts in args
    Slice,   ///< empty subscript position, only inside Ref args
    Neg,     ///< args[0]
    Binary,  ///< op in {+,-,*,/}, args[0] op args[1]
    Call,    ///< builtin over args
  };

  Kind kind = Kind::Number;
  double value = 0.0;
  std::string name;
  char op = 0;
  Builtin fn = Builtin::Sqrt;
  std::vector<Expr> args;
  SourcePos pos;

  static Expr number(double v, SourcePos p = {});
  static Expr ref(std::string name, std::vector<Expr> subscripts = {}, SourcePos p = {});
  static Expr slice(SourcePos p = {});
  static Expr neg(Expr operand, SourcePos p = {});
  static Expr binary(char op, Expr lhs, Expr rhs, SourcePos p = {});
  static Expr call(Builtin fn, std::vector<Expr> args, SourcePos p = {});

  /// Structural equality; source positions are ignored.
  friend bool operator==(const Expr& a, const Expr& b);
};

struct Statement {
  enum class Kind { For, Deterministic, Stochastic };

  Kind kind = Kind::Deterministic;
  // For
  std::string index_var;
  Expr lo;
  Expr hi;
  std::vector<Statement> body;
  // Deterministic / Stochastic
  Expr lhs;                 ///< always a Ref
  Expr rhs;                 ///< Deterministic
  DistKind dist = DistKind::Normal;
  std::vector<Expr> dist_args;  ///< Stochastic
  SourcePos pos;

  friend bool operator==(const Statement& a, const Statement& b);
};

struct ModelAst {
  std::vector<Statement> statements;

  friend bool operator==(const ModelAst&, const ModelAst&) = default;
};

/// Pretty-prints an AST back to model source. Output re-parses to a
/// structurally equal AST.
std::string print(const ModelAst& model);
std::string print(const Expr& expr);

}  // namespace darkworlds::bugs

#endif  // DARKWORLDS_BUGS_AST_HPP
