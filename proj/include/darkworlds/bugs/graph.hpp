#ifndef DARKWORLDS_BUGS_GRAPH_HPP
#define DARKWORLDS_BUGS_GRAPH_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "darkworlds/bugs/ast.hpp"

namespace darkworlds::bugs {

using NodeId = std::uint32_t;

/// Dense array bound as model data; values are row-major, subscripts in
/// the model are 1-based.
struct DataArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  static DataArray vector(std::vector<double> v) {
    const std::size_t n = v.size();
    return {{n}, std::move(v)};
  }
  std::size_t size() const { return values.size(); }
};

using Constants = std::map<std::string, double>;
using DataTable = std::map<std::string, DataArray>;

/// Postfix instruction of a compiled expression.
struct Instr {
  enum class Op : std::uint8_t { Const, Load, Add, Sub, Mul, Div, Neg, Sqrt, Atan2, Cos, Sin, Exp };
  Op op;
  NodeId node = 0;
  double value = 0.0;
};

using Program = std::vector<Instr>;

inline constexpr std::size_t kMaxStackDepth = 64;

/// Runs a compiled expression against node values.
double evaluate(const Program& program, std::span<const double> values);

enum class NodeKind { Deterministic, Stochastic };

struct Node {
  std::string name;  ///< e.g. "loc[1,2]"
  std::string array;
  std::vector<int> indices;
  NodeKind kind = NodeKind::Deterministic;
  Program expr;  ///< deterministic nodes
  DistKind dist = DistKind::Normal;
  std::array<Program, 2> params;  ///< stochastic nodes
  std::vector<NodeId> parents;
  std::vector<NodeId> children;
  bool observed = false;
  double observed_value = 0.0;

  bool is_latent() const { return kind == NodeKind::Stochastic && !observed; }
};

namespace detail {
struct GraphAccess;
}

/// Nodes whose evaluation changes when a latent node changes.
struct MarkovBlanket {
  std::vector<NodeId> deterministic;  ///< topological order
  std::vector<NodeId> stochastic;     ///< observed or latent, excluding the node itself
};

/// Plate-expanded directed graphical model. Immutable after compile();
/// nodes are in topological order.
class CompiledGraph {
public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

  /// Unobserved stochastic nodes, in node order.
  const std::vector<NodeId>& latent() const { return latent_; }
  /// Position of a latent node in latent(), if it is one.
  std::optional<std::size_t> latent_index(NodeId id) const;

  std::optional<NodeId> find(const std::string& name) const;
  std::optional<NodeId> find(const std::string& array, const std::vector<int>& indices) const;

  const MarkovBlanket& blanket(NodeId latent_node) const;
  const Constants& constants() const { return constants_; }

  std::size_t count(NodeKind kind) const;
  std::size_t observed_count() const;

private:
  friend struct detail::GraphAccess;

  std::vector<Node> nodes_;
  std::vector<NodeId> latent_;
  std::vector<std::int64_t> latent_pos_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::vector<MarkovBlanket> blankets_;  // indexed by latent position
  Constants constants_;
};

std::string node_name(const std::string& array, const std::vector<int>& indices);

/// Unrolls loops, binds data and orders nodes topologically.
/// Throws CompileError on undefined variables, dimension mismatches,
/// cycles and multiply assigned nodes.
CompiledGraph compile(const ModelAst& ast, const Constants& constants, const DataTable& data);

/// Names referenced by the model that no statement assigns and no loop binds.
std::set<std::string> free_variables(const ModelAst& ast);
/// Names on the left of '~'.
std::set<std::string> stochastic_variables(const ModelAst& ast);

/// Log-density of a stochastic node given the values of its parents.
double node_log_density(const Node& node, double value, std::span<const double> values);

/// Sum of all stochastic log-densities. `latent_values` is aligned with
/// graph.latent(); `scratch` receives every node value and is resized as
/// needed, so concurrent callers each pass their own.
double log_joint(const CompiledGraph& graph, std::span<const double> latent_values,
                 std::vector<double>& scratch);
double log_joint(const CompiledGraph& graph, std::span<const double> latent_values);
/// Name-keyed variant; throws Error when a latent node is missing.
double log_joint(const CompiledGraph& graph, const std::map<std::string, double>& assignment);

/// Fills `values` (resized to graph.size()) from latent values.
void evaluate_all(const CompiledGraph& graph, std::span<const double> latent_values,
                  std::vector<double>& values);

}  // namespace darkworlds::bugs

#endif  // DARKWORLDS_BUGS_GRAPH_HPP
