#include "darkworlds/bugs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "darkworlds/density.hpp"

namespace darkworlds::bugs {

double evaluate(const Program& program, std::span<const double> values) {
  std::array<double, kMaxStackDepth> stack;
  std::size_t top = 0;
  for (const Instr& in : program) {
    switch (in.op) {
      case Instr::Op::Const: stack[top++] = in.value; break;
      case Instr::Op::Load: stack[top++] = values[in.node]; break;
      case Instr::Op::Add: --top; stack[top - 1] += stack[top]; break;
      case Instr::Op::Sub: --top; stack[top - 1] -= stack[top]; break;
      case Instr::Op::Mul: --top; stack[top - 1] *= stack[top]; break;
      case Instr::Op::Div: --top; stack[top - 1] /= stack[top]; break;
      case Instr::Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Instr::Op::Sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
      case Instr::Op::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Instr::Op::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Instr::Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Instr::Op::Atan2:
        --top;
        stack[top - 1] = std::atan2(stack[top - 1], stack[top]);
        break;
    }
  }
  return stack[0];
}

std::string node_name(const std::string& array, const std::vector<int>& indices) {
  if (indices.empty()) return array;
  std::string s = array + "[";
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(indices[k]);
  }
  return s + "]";
}

std::optional<std::size_t> CompiledGraph::latent_index(NodeId id) const {
  if (id >= latent_pos_.size() || latent_pos_[id] < 0) return std::nullopt;
  return static_cast<std::size_t>(latent_pos_[id]);
}

std::optional<NodeId> CompiledGraph::find(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> CompiledGraph::find(const std::string& array,
                                          const std::vector<int>& indices) const {
  return find(node_name(array, indices));
}

const MarkovBlanket& CompiledGraph::blanket(NodeId latent_node) const {
  const auto pos = latent_index(latent_node);
  if (!pos) throw Error("node '" + node(latent_node).name + "' is not an unobserved stochastic node");
  return blankets_[*pos];
}

std::size_t CompiledGraph::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind == kind; }));
}

std::size_t CompiledGraph::observed_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.observed; }));
}

namespace detail {

struct GraphAccess {
  static std::vector<Node>& nodes(CompiledGraph& g) { return g.nodes_; }
  static std::vector<NodeId>& latent(CompiledGraph& g) { return g.latent_; }
  static std::vector<std::int64_t>& latent_pos(CompiledGraph& g) { return g.latent_pos_; }
  static std::unordered_map<std::string, NodeId>& by_name(CompiledGraph& g) { return g.by_name_; }
  static std::vector<MarkovBlanket>& blankets(CompiledGraph& g) { return g.blankets_; }
  static Constants& constants(CompiledGraph& g) { return g.constants_; }
};

}  // namespace detail

namespace {

using Env = std::vector<std::pair<std::string, int>>;

struct Pending {
  const Statement* stmt;
  Env env;
  std::string array;
  std::vector<int> indices;
};

struct ArrayInfo {
  std::size_t rank = 0;
  std::vector<int> extent;
  bool stochastic = false;
  bool deterministic = false;
  std::size_t count = 0;
};

struct DataUsage {
  std::vector<int> max_index;
  bool used = false;
};

const int* lookup(const Env& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

class Compiler {
public:
  Compiler(const ModelAst& ast, const Constants& constants, const DataTable& data)
      : ast_(ast), constants_(constants), data_(data) {}

  CompiledGraph run() {
    Env env;
    unroll(ast_.statements, env);
    check_arrays();
    build_nodes();
    check_data_usage();
    return order();
  }

private:
  // --- constant evaluation --------------------------------------------------

  double const_eval(const Expr& e, const Env& env, const char* context) const {
    switch (e.kind) {
      case Expr::Kind::Number: return e.value;
      case Expr::Kind::Ref: {
        if (e.args.empty()) {
          if (const int* v = lookup(env, e.name)) return *v;
          if (auto it = constants_.find(e.name); it != constants_.end()) return it->second;
        }
        throw CompileError(std::string(context) + " must be constant, but references '" +
                           print(e) + "' at " + where(e.pos));
      }
      case Expr::Kind::Neg: return -const_eval(e.args[0], env, context);
      case Expr::Kind::Binary: {
        const double a = const_eval(e.args[0], env, context);
        const double b = const_eval(e.args[1], env, context);
        switch (e.op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          default: return a / b;
        }
      }
      case Expr::Kind::Call: {
        std::vector<double> a;
        for (const auto& x : e.args) a.push_back(const_eval(x, env, context));
        switch (e.fn) {
          case Builtin::Sqrt: return std::sqrt(a[0]);
          case Builtin::Atan2: return std::atan2(a[0], a[1]);
          case Builtin::Cos: return std::cos(a[0]);
          case Builtin::Sin: return std::sin(a[0]);
          case Builtin::Exp: return std::exp(a[0]);
          case Builtin::Sum: {
            double s = 0;
            for (double v : a) s += v;
            return s;
          }
        }
        return 0;
      }
      case Expr::Kind::Slice: break;
    }
    throw CompileError(std::string(context) + " must be constant at " + where(e.pos));
  }

  int const_int(const Expr& e, const Env& env, const char* context) const {
    const double v = const_eval(e, env, context);
    if (!std::isfinite(v) || std::nearbyint(v) != v || std::abs(v) > 1e9)
      throw CompileError(std::string(context) + " '" + print(e) + "' is not an integer (" +
                         std::to_string(v) + ") at " + where(e.pos));
    return static_cast<int>(v);
  }

  static std::string where(SourcePos p) {
    return "line " + std::to_string(p.line) + ", column " + std::to_string(p.column);
  }

  // --- unrolling ------------------------------------------------------------

  void unroll(const std::vector<Statement>& body, Env& env) {
    for (const auto& s : body) {
      if (s.kind == Statement::Kind::For) {
        const int lo = const_int(s.lo, env, "loop bound");
        const int hi = const_int(s.hi, env, "loop bound");
        for (int i = lo; i <= hi; ++i) {
          env.emplace_back(s.index_var, i);
          unroll(s.body, env);
          env.pop_back();
        }
        continue;
      }
      Pending p{&s, env, s.lhs.name, {}};
      for (const auto& sub : s.lhs.args) {
        const int idx = const_int(sub, env, "subscript");
        if (idx < 1)
          throw CompileError("subscript of '" + s.lhs.name + "' must be >= 1 at " +
                             where(sub.pos));
        p.indices.push_back(idx);
      }
      if (lookup(env, p.array) || constants_.count(p.array))
        throw CompileError("cannot assign to '" + p.array + "', it names a constant or loop index");
      std::string key = node_name(p.array, p.indices);
      if (!pending_index_.emplace(key, pending_.size()).second)
        throw CompileError("node '" + key + "' is multiply assigned (" + where(s.pos) + ")");

      ArrayInfo& info = arrays_[p.array];
      if (info.count == 0) {
        info.rank = p.indices.size();
        info.extent.assign(info.rank, 0);
      } else if (info.rank != p.indices.size()) {
        throw CompileError("dimension mismatch: '" + p.array + "' used with " +
                           std::to_string(p.indices.size()) + " and " + std::to_string(info.rank) +
                           " subscripts");
      }
      for (std::size_t d = 0; d < info.rank; ++d)
        info.extent[d] = std::max(info.extent[d], p.indices[d]);
      ++info.count;
      (s.kind == Statement::Kind::Stochastic ? info.stochastic : info.deterministic) = true;
      pending_.push_back(std::move(p));
    }
  }

  void check_arrays() const {
    for (const auto& [name, info] : arrays_) {
      if (info.stochastic && info.deterministic)
        throw CompileError("'" + name + "' is defined both by '<-' and '~'");
      const auto it = data_.find(name);
      if (it == data_.end()) continue;
      if (info.deterministic)
        throw CompileError("data bound to deterministic variable '" + name + "'");
      const DataArray& arr = it->second;
      if (arr.shape.size() != info.rank && !(info.rank == 0 && arr.size() == 1))
        throw CompileError("dimension mismatch: data '" + name + "' has rank " +
                           std::to_string(arr.shape.size()) + ", model uses rank " +
                           std::to_string(info.rank));
      for (std::size_t d = 0; d < info.rank; ++d) {
        if (static_cast<std::size_t>(info.extent[d]) != arr.shape[d])
          throw CompileError("dimension mismatch: data '" + name + "' has extent " +
                             std::to_string(arr.shape[d]) + " in dimension " +
                             std::to_string(d + 1) + ", model defines " +
                             std::to_string(info.extent[d]));
      }
      if (info.count != arr.size())
        throw CompileError("dimension mismatch: data '" + name + "' has " +
                           std::to_string(arr.size()) + " values, model defines " +
                           std::to_string(info.count) + " nodes");
    }
  }

  // --- expression compilation ----------------------------------------------

  std::size_t data_offset(const std::string& name, const DataArray& arr,
                          const std::vector<int>& idx, SourcePos pos) {
    const bool scalar = arr.shape.empty() || (arr.shape.size() == 1 && arr.shape[0] == 1);
    if (idx.empty() && scalar) return 0;
    if (arr.shape.size() != idx.size())
      throw CompileError("dimension mismatch: data '" + name + "' has rank " +
                         std::to_string(arr.shape.size()) + ", referenced with " +
                         std::to_string(idx.size()) + " subscripts at " + where(pos));
    std::size_t off = 0;
    DataUsage& use = data_usage_[name];
    use.used = true;
    use.max_index.resize(idx.size(), 0);
    for (std::size_t d = 0; d < idx.size(); ++d) {
      if (idx[d] < 1 || static_cast<std::size_t>(idx[d]) > arr.shape[d])
        throw CompileError("dimension mismatch: " + node_name(name, idx) + " is outside data '" +
                           name + "' at " + where(pos));
      use.max_index[d] = std::max(use.max_index[d], idx[d]);
      off = off * arr.shape[d] + static_cast<std::size_t>(idx[d] - 1);
    }
    return off;
  }

  void emit_resolved(const std::string& name, const std::vector<int>& idx, SourcePos pos,
                     Program& out) {
    if (arrays_.count(name)) {
      const auto it = pending_index_.find(node_name(name, idx));
      if (it == pending_index_.end())
        throw CompileError("undefined variable '" + node_name(name, idx) + "' at " + where(pos));
      out.push_back({Instr::Op::Load, static_cast<NodeId>(it->second), 0.0});
      return;
    }
    if (const auto it = data_.find(name); it != data_.end()) {
      const std::size_t off = data_offset(name, it->second, idx, pos);
      out.push_back({Instr::Op::Const, 0, it->second.values[off]});
      return;
    }
    throw CompileError("undefined variable '" + name + "' at " + where(pos));
  }

  // Expands a reference, possibly containing slices, to concrete subscripts.
  std::vector<std::vector<int>> expand(const Expr& ref, const Env& env) const {
    std::vector<int> extent;
    if (const auto it = arrays_.find(ref.name); it != arrays_.end()) {
      extent = it->second.extent;
    } else if (const auto d = data_.find(ref.name); d != data_.end()) {
      for (auto s : d->second.shape) extent.push_back(static_cast<int>(s));
    }
    std::vector<std::vector<int>> out{{}};
    for (std::size_t k = 0; k < ref.args.size(); ++k) {
      std::vector<int> choices;
      if (ref.args[k].kind == Expr::Kind::Slice) {
        if (k >= extent.size())
          throw CompileError("dimension mismatch: cannot slice '" + ref.name + "' in dimension " +
                             std::to_string(k + 1) + " at " + where(ref.pos));
        for (int i = 1; i <= extent[k]; ++i) choices.push_back(i);
      } else {
        choices.push_back(const_int(ref.args[k], env, "subscript"));
      }
      std::vector<std::vector<int>> next;
      for (const auto& prefix : out) {
        for (int c : choices) {
          next.push_back(prefix);
          next.back().push_back(c);
        }
      }
      out = std::move(next);
    }
    return out;
  }

  void emit(const Expr& e, const Env& env, Program& out) {
    switch (e.kind) {
      case Expr::Kind::Number: out.push_back({Instr::Op::Const, 0, e.value}); return;
      case Expr::Kind::Ref: {
        if (e.args.empty()) {
          if (const int* v = lookup(env, e.name)) {
            out.push_back({Instr::Op::Const, 0, static_cast<double>(*v)});
            return;
          }
          if (const auto it = constants_.find(e.name); it != constants_.end()) {
            out.push_back({Instr::Op::Const, 0, it->second});
            return;
          }
        }
        std::vector<int> idx;
        for (const auto& sub : e.args) idx.push_back(const_int(sub, env, "subscript"));
        emit_resolved(e.name, idx, e.pos, out);
        return;
      }
      case Expr::Kind::Neg:
        emit(e.args[0], env, out);
        out.push_back({Instr::Op::Neg});
        return;
      case Expr::Kind::Binary: {
        emit(e.args[0], env, out);
        emit(e.args[1], env, out);
        Instr::Op op = Instr::Op::Add;
        switch (e.op) {
          case '-': op = Instr::Op::Sub; break;
          case '*': op = Instr::Op::Mul; break;
          case '/': op = Instr::Op::Div; break;
          default: break;
        }
        out.push_back({op});
        return;
      }
      case Expr::Kind::Call: {
        if (e.fn == Builtin::Sum) {
          bool first = true;
          for (const auto& arg : e.args) {
            const bool is_slice =
                arg.kind == Expr::Kind::Ref &&
                std::any_of(arg.args.begin(), arg.args.end(),
                            [](const Expr& s) { return s.kind == Expr::Kind::Slice; });
            if (!is_slice) {
              emit(arg, env, out);
              if (!first) out.push_back({Instr::Op::Add});
              first = false;
              continue;
            }
            for (const auto& idx : expand(arg, env)) {
              emit_resolved(arg.name, idx, arg.pos, out);
              if (!first) out.push_back({Instr::Op::Add});
              first = false;
            }
          }
          if (first) out.push_back({Instr::Op::Const, 0, 0.0});
          return;
        }
        for (const auto& arg : e.args) emit(arg, env, out);
        Instr::Op op = Instr::Op::Sqrt;
        switch (e.fn) {
          case Builtin::Atan2: op = Instr::Op::Atan2; break;
          case Builtin::Cos: op = Instr::Op::Cos; break;
          case Builtin::Sin: op = Instr::Op::Sin; break;
          case Builtin::Exp: op = Instr::Op::Exp; break;
          default: break;
        }
        out.push_back({op});
        return;
      }
      case Expr::Kind::Slice: break;
    }
    throw CompileError("empty subscript outside sum() at " + where(e.pos));
  }

  Program compile_expr(const Expr& e, const Env& env) {
    Program p;
    emit(e, env, p);
    std::size_t depth = 0, max_depth = 0;
    for (const auto& in : p) {
      switch (in.op) {
        case Instr::Op::Const:
        case Instr::Op::Load: ++depth; break;
        case Instr::Op::Add:
        case Instr::Op::Sub:
        case Instr::Op::Mul:
        case Instr::Op::Div:
        case Instr::Op::Atan2: --depth; break;
        default: break;
      }
      max_depth = std::max(max_depth, depth);
    }
    if (max_depth > kMaxStackDepth)
      throw CompileError("expression nested too deeply at " + where(e.pos));
    return p;
  }

  void build_nodes() {
    nodes_.reserve(pending_.size());
    for (const auto& p : pending_) {
      Node n;
      n.name = node_name(p.array, p.indices);
      n.array = p.array;
      n.indices = p.indices;
      if (p.stmt->kind == Statement::Kind::Deterministic) {
        n.kind = NodeKind::Deterministic;
        n.expr = compile_expr(p.stmt->rhs, p.env);
      } else {
        n.kind = NodeKind::Stochastic;
        n.dist = p.stmt->dist;
        for (std::size_t k = 0; k < 2; ++k) n.params[k] = compile_expr(p.stmt->dist_args[k], p.env);
        if (const auto it = data_.find(p.array); it != data_.end()) {
          n.observed = true;
          std::size_t off = 0;
          const auto& shape = it->second.shape;
          for (std::size_t d = 0; d < p.indices.size(); ++d)
            off = off * shape[d] + static_cast<std::size_t>(p.indices[d] - 1);
          n.observed_value = it->second.values[off];
        }
      }
      std::vector<NodeId> parents;
      auto collect = [&parents](const Program& prog) {
        for (const auto& in : prog)
          if (in.op == Instr::Op::Load) parents.push_back(in.node);
      };
      collect(n.expr);
      collect(n.params[0]);
      collect(n.params[1]);
      std::sort(parents.begin(), parents.end());
      parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
      n.parents = std::move(parents);
      nodes_.push_back(std::move(n));
    }
  }

  // Covariate arrays must be referenced over their full extent.
  void check_data_usage() const {
    for (const auto& [name, use] : data_usage_) {
      if (!use.used || arrays_.count(name)) continue;
      const auto& shape = data_.at(name).shape;
      for (std::size_t d = 0; d < shape.size() && d < use.max_index.size(); ++d) {
        if (static_cast<std::size_t>(use.max_index[d]) != shape[d])
          throw CompileError("dimension mismatch: data '" + name + "' has extent " +
                             std::to_string(shape[d]) + " in dimension " + std::to_string(d + 1) +
                             ", model uses " + std::to_string(use.max_index[d]));
      }
    }
  }

  // Kahn's algorithm, ties broken by creation order.
  CompiledGraph order() {
    const std::size_t n = nodes_.size();
    std::vector<std::vector<NodeId>> children(n);
    std::vector<std::size_t> indegree(n, 0);
    for (NodeId v = 0; v < n; ++v) {
      for (NodeId p : nodes_[v].parents) {
        if (p == v) throw CompileError("cyclic dependency: '" + nodes_[v].name + "' depends on itself");
        children[p].push_back(v);
        ++indegree[v];
      }
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v)
      if (indegree[v] == 0) ready.push(v);
    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
      const NodeId v = ready.top();
      ready.pop();
      order.push_back(v);
      for (NodeId c : children[v])
        if (--indegree[c] == 0) ready.push(c);
    }
    if (order.size() != n) {
      for (NodeId v = 0; v < n; ++v)
        if (indegree[v] > 0)
          throw CompileError("cyclic dependency involving '" + nodes_[v].name + "'");
    }

    std::vector<NodeId> new_id(n);
    for (NodeId k = 0; k < n; ++k) new_id[order[k]] = k;

    CompiledGraph g;
    using A = detail::GraphAccess;
    A::constants(g) = constants_;
    std::vector<Node>& nodes = A::nodes(g);
    nodes.reserve(n);
    for (NodeId k = 0; k < n; ++k) {
      Node node = std::move(nodes_[order[k]]);
      for (Program* prog : {&node.expr, &node.params[0], &node.params[1]})
        for (auto& in : *prog)
          if (in.op == Instr::Op::Load) in.node = new_id[in.node];
      for (auto& p : node.parents) p = new_id[p];
      std::sort(node.parents.begin(), node.parents.end());
      nodes.push_back(std::move(node));
    }
    for (NodeId k = 0; k < n; ++k) {
      for (NodeId p : nodes[k].parents) {
        if (p >= k) throw CompileError("internal error: topological order violated");
        nodes[p].children.push_back(k);
      }
      A::by_name(g).emplace(nodes[k].name, k);
    }

    auto& latent = A::latent(g);
    auto& latent_pos = A::latent_pos(g);
    latent_pos.assign(n, -1);
    for (NodeId k = 0; k < n; ++k) {
      if (nodes[k].is_latent()) {
        latent_pos[k] = static_cast<std::int64_t>(latent.size());
        latent.push_back(k);
      }
    }
    for (NodeId v : latent) A::blankets(g).push_back(blanket_of(nodes, v));
    return g;
  }

  static MarkovBlanket blanket_of(const std::vector<Node>& nodes, NodeId v) {
    MarkovBlanket b;
    std::vector<char> seen(nodes.size(), 0);
    std::vector<NodeId> stack(nodes[v].children.begin(), nodes[v].children.end());
    while (!stack.empty()) {
      const NodeId c = stack.back();
      stack.pop_back();
      if (seen[c]) continue;
      seen[c] = 1;
      if (nodes[c].kind == NodeKind::Stochastic) {
        b.stochastic.push_back(c);
      } else {
        b.deterministic.push_back(c);
        stack.insert(stack.end(), nodes[c].children.begin(), nodes[c].children.end());
      }
    }
    std::sort(b.deterministic.begin(), b.deterministic.end());
    std::sort(b.stochastic.begin(), b.stochastic.end());
    return b;
  }

  const ModelAst& ast_;
  const Constants& constants_;
  const DataTable& data_;
  std::vector<Pending> pending_;
  std::unordered_map<std::string, std::size_t> pending_index_;
  std::map<std::string, ArrayInfo> arrays_;
  std::map<std::string, DataUsage> data_usage_;
  std::vector<Node> nodes_;
};

void collect_names(const Expr& e, std::set<std::string>& refs) {
  if (e.kind == Expr::Kind::Ref) refs.insert(e.name);
  for (const auto& a : e.args) collect_names(a, refs);
}

void walk(const std::vector<Statement>& body, std::set<std::string>& refs,
          std::set<std::string>& assigned, std::set<std::string>& stochastic,
          std::set<std::string>& loop_vars) {
  for (const auto& s : body) {
    switch (s.kind) {
      case Statement::Kind::For:
        loop_vars.insert(s.index_var);
        collect_names(s.lo, refs);
        collect_names(s.hi, refs);
        walk(s.body, refs, assigned, stochastic, loop_vars);
        break;
      case Statement::Kind::Deterministic:
        assigned.insert(s.lhs.name);
        for (const auto& a : s.lhs.args) collect_names(a, refs);
        collect_names(s.rhs, refs);
        break;
      case Statement::Kind::Stochastic:
        assigned.insert(s.lhs.name);
        stochastic.insert(s.lhs.name);
        for (const auto& a : s.lhs.args) collect_names(a, refs);
        for (const auto& a : s.dist_args) collect_names(a, refs);
        break;
    }
  }
}

}  // namespace

CompiledGraph compile(const ModelAst& ast, const Constants& constants, const DataTable& data) {
  for (const auto& [name, arr] : data) {
    std::size_t n = 1;
    for (auto s : arr.shape) n *= s;
    if (n != arr.values.size())
      throw CompileError("data '" + name + "' shape does not match its value count");
  }
  return Compiler(ast, constants, data).run();
}

std::set<std::string> free_variables(const ModelAst& ast) {
  std::set<std::string> refs, assigned, stochastic, loop_vars;
  walk(ast.statements, refs, assigned, stochastic, loop_vars);
  std::set<std::string> out;
  for (const auto& r : refs)
    if (!assigned.count(r) && !loop_vars.count(r)) out.insert(r);
  return out;
}

std::set<std::string> stochastic_variables(const ModelAst& ast) {
  std::set<std::string> refs, assigned, stochastic, loop_vars;
  walk(ast.statements, refs, assigned, stochastic, loop_vars);
  return stochastic;
}

double node_log_density(const Node& node, double value, std::span<const double> values) {
  const double a = evaluate(node.params[0], values);
  const double b = evaluate(node.params[1], values);
  switch (node.dist) {
    case DistKind::Normal: return density::normal_log(value, a, b);
    case DistKind::Gamma: return density::gamma_log(value, a, b);
    case DistKind::Uniform: return density::uniform_log(value, a, b);
  }
  return density::neg_inf<double>();
}

void evaluate_all(const CompiledGraph& graph, std::span<const double> latent_values,
                  std::vector<double>& values) {
  if (latent_values.size() != graph.latent().size())
    throw Error("assignment has " + std::to_string(latent_values.size()) + " values, graph has " +
                std::to_string(graph.latent().size()) + " unobserved nodes");
  values.resize(graph.size());
  std::size_t next_latent = 0;
  const auto& nodes = graph.nodes();
  for (NodeId k = 0; k < nodes.size(); ++k) {
    const Node& n = nodes[k];
    if (n.kind == NodeKind::Deterministic) values[k] = evaluate(n.expr, values);
    else if (n.observed) values[k] = n.observed_value;
    else values[k] = latent_values[next_latent++];
  }
}

double log_joint(const CompiledGraph& graph, std::span<const double> latent_values,
                 std::vector<double>& scratch) {
  evaluate_all(graph, latent_values, scratch);
  double total = 0.0;
  const auto& nodes = graph.nodes();
  for (NodeId k = 0; k < nodes.size(); ++k) {
    if (nodes[k].kind != NodeKind::Stochastic) continue;
    total += node_log_density(nodes[k], scratch[k], scratch);
    if (total == -std::numeric_limits<double>::infinity()) return total;
  }
  return total;
}

double log_joint(const CompiledGraph& graph, std::span<const double> latent_values) {
  std::vector<double> scratch;
  return log_joint(graph, latent_values, scratch);
}

double log_joint(const CompiledGraph& graph, const std::map<std::string, double>& assignment) {
  std::vector<double> latent;
  latent.reserve(graph.latent().size());
  for (NodeId id : graph.latent()) {
    const auto it = assignment.find(graph.node(id).name);
    if (it == assignment.end())
      throw Error("assignment is missing unobserved node '" + graph.node(id).name + "'");
    latent.push_back(it->second);
  }
  return log_joint(graph, latent);
}

}  // namespace darkworlds::bugs
