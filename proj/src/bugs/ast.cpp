#include "darkworlds/bugs/ast.hpp"

#include <array>
#include <charconv>
#include <utility>

namespace darkworlds::bugs {

namespace {

struct BuiltinInfo {
  Builtin id;
  std::string_view name;
  int arity;  // -1: variadic
};

constexpr std::array<BuiltinInfo, 6> kBuiltins{{
    {Builtin::Sqrt, "sqrt", 1},
    {Builtin::Atan2, "atan2", 2},
    {Builtin::Cos, "cos", 1},
    {Builtin::Sin, "sin", 1},
    {Builtin::Sum, "sum", -1},
    {Builtin::Exp, "exp", 1},
}};

constexpr std::array<std::pair<DistKind, std::string_view>, 3> kDists{{
    {DistKind::Normal, "dnorm"},
    {DistKind::Gamma, "dgamma"},
    {DistKind::Uniform, "dunif"},
}};

}  // namespace

bool builtin_from_name(std::string_view name, Builtin& out) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) {
      out = b.id;
      return true;
    }
  }
  return false;
}

std::string_view builtin_name(Builtin b) {
  for (const auto& info : kBuiltins)
    if (info.id == b) return info.name;
  return "?";
}

int builtin_arity(Builtin b) {
  for (const auto& info : kBuiltins)
    if (info.id == b) return info.arity;
  return 0;
}

bool dist_from_name(std::string_view name, DistKind& out) {
  for (const auto& [kind, n] : kDists) {
    if (n == name) {
      out = kind;
      return true;
    }
  }
  return false;
}

std::string_view dist_name(DistKind d) {
  for (const auto& [kind, n] : kDists)
    if (kind == d) return n;
  return "?";
}

Expr Expr::number(double v, SourcePos p) {
  Expr e;
  e.kind = Kind::Number;
  e.value = v;
  e.pos = p;
  return e;
}

Expr Expr::ref(std::string name, std::vector<Expr> subscripts, SourcePos p) {
  Expr e;
  e.kind = Kind::Ref;
  e.name = std::move(name);
  e.args = std::move(subscripts);
  e.pos = p;
  return e;
}

Expr Expr::slice(SourcePos p) {
  Expr e;
  e.kind = Kind::Slice;
  e.pos = p;
  return e;
}

Expr Expr::neg(Expr operand, SourcePos p) {
  Expr e;
  e.kind = Kind::Neg;
  e.args.push_back(std::move(operand));
  e.pos = p;
  return e;
}

Expr Expr::binary(char op, Expr lhs, Expr rhs, SourcePos p) {
  Expr e;
  e.kind = Kind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.pos = p;
  return e;
}

Expr Expr::call(Builtin fn, std::vector<Expr> args, SourcePos p) {
  Expr e;
  e.kind = Kind::Call;
  e.fn = fn;
  e.args = std::move(args);
  e.pos = p;
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number: return a.value == b.value;
    case Expr::Kind::Slice: return true;
    case Expr::Kind::Ref:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Neg: break;
    case Expr::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case Expr::Kind::Call:
      if (a.fn != b.fn) return false;
      break;
  }
  return a.args == b.args;
}

bool operator==(const Statement& a, const Statement& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Statement::Kind::For:
      return a.index_var == b.index_var && a.lo == b.lo && a.hi == b.hi && a.body == b.body;
    case Statement::Kind::Deterministic: return a.lhs == b.lhs && a.rhs == b.rhs;
    case Statement::Kind::Stochastic:
      return a.lhs == b.lhs && a.dist == b.dist && a.dist_args == b.dist_args;
  }
  return false;
}

// --- printing ---------------------------------------------------------------

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary: return (e.op == '+' || e.op == '-') ? 1 : 2;
    case Expr::Kind::Neg: return 3;
    default: return 4;
  }
}

void print_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void print_expr(std::string& out, const Expr& e);

void print_operand(std::string& out, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    out += '(';
    print_expr(out, e);
    out += ')';
  } else {
    print_expr(out, e);
  }
}

void print_list(std::string& out, const std::vector<Expr>& items) {
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += ", ";
    print_expr(out, items[k]);
  }
}

void print_expr(std::string& out, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: print_number(out, e.value); break;
    case Expr::Kind::Slice: break;
    case Expr::Kind::Ref:
      out += e.name;
      if (!e.args.empty()) {
        out += '[';
        print_list(out, e.args);
        out += ']';
      }
      break;
    case Expr::Kind::Neg:
      out += '-';
      print_operand(out, e.args[0], 3);
      break;
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      print_operand(out, e.args[0], p);
      out += ' ';
      out += e.op;
      out += ' ';
      // right operand of equal precedence keeps its grouping
      print_operand(out, e.args[1], p + 1);
      break;
    }
    case Expr::Kind::Call:
      out += builtin_name(e.fn);
      out += '(';
      print_list(out, e.args);
      out += ')';
      break;
  }
}

void print_statements(std::string& out, const std::vector<Statement>& body, int depth) {
  const std::string indent(2 * static_cast<std::size_t>(depth), ' ');
  for (const auto& s : body) {
    out += indent;
    switch (s.kind) {
      case Statement::Kind::For:
        out += "for (" + s.index_var + " in ";
        print_expr(out, s.lo);
        out += " : ";
        print_expr(out, s.hi);
        out += ") {\n";
        print_statements(out, s.body, depth + 1);
        out += indent + "}\n";
        break;
      case Statement::Kind::Deterministic:
        print_expr(out, s.lhs);
        out += " <- ";
        print_expr(out, s.rhs);
        out += '\n';
        break;
      case Statement::Kind::Stochastic:
        print_expr(out, s.lhs);
        out += " ~ ";
        out += dist_name(s.dist);
        out += '(';
        print_list(out, s.dist_args);
        out += ")\n";
        break;
    }
  }
}

}  // namespace

std::string print(const Expr& expr) {
  std::string out;
  print_expr(out, expr);
  return out;
}

std::string print(const ModelAst& model) {
  std::string out = "model {\n";
  print_statements(out, model.statements, 1);
  out += "}\n";
  return out;
}

}  // namespace darkworlds::bugs
