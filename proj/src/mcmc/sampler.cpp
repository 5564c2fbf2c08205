#include "darkworlds/mcmc/sampler.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "darkworlds/mcmc/transform.hpp"

namespace darkworlds::mcmc {

using bugs::CompiledGraph;
using bugs::Node;
using bugs::NodeId;
using bugs::NodeKind;

void SamplerConfig::validate() const {
  if (iterations == 0 || thin == 0 || n_chains == 0 || adapt_interval == 0)
    throw ConfigError("iterations, thin, chains and adapt_interval must be positive");
  if (burn_in >= iterations) throw ConfigError("burn-in must be smaller than iterations");
  if (!(target_accept > 0 && target_accept < 1))
    throw ConfigError("target acceptance must lie in (0, 1)");
}

std::size_t Draws::total() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += static_cast<std::size_t>(c.samples.rows());
  return n;
}

namespace {

// Node log-density plus its stochastic children reached through
// deterministic nodes; `values` must be consistent.
double blanket_sum(const CompiledGraph& graph, NodeId node, std::span<const double> values) {
  double total = bugs::node_log_density(graph.node(node), values[node], values);
  for (NodeId s : graph.blanket(node).stochastic) {
    if (total == -std::numeric_limits<double>::infinity()) break;
    total += bugs::node_log_density(graph.node(s), values[s], values);
  }
  return total;
}

void recompute(const CompiledGraph& graph, const std::vector<NodeId>& dets, std::vector<double>& values) {
  for (NodeId d : dets) values[d] = bugs::evaluate(graph.node(d).expr, values);
}

double prior_draw(const Node& n, std::span<const double> values, Rng& rng) {
  const double a = bugs::evaluate(n.params[0], values);
  const double b = bugs::evaluate(n.params[1], values);
  switch (n.dist) {
    case bugs::DistKind::Normal:
      return std::normal_distribution<double>(a, 1.0 / std::sqrt(b))(rng);
    case bugs::DistKind::Gamma:
      return std::gamma_distribution<double>(a, 1.0 / b)(rng);
    case bugs::DistKind::Uniform:
      return std::uniform_real_distribution<double>(a, b)(rng);
  }
  return 0.0;
}

// Prior draws of vague priors can sit numerically on the support boundary
// (a Gamma(0.001, 0.001) draw is usually 0 in double precision); such
// starts are replaced by a Uniform(-2, 2) draw on the unconstrained scale.
constexpr double kMaxInitialMagnitude = 20.0;

}  // namespace

double full_conditional_logdensity(const CompiledGraph& graph, NodeId node, double proposed,
                                   std::span<const double> current) {
  if (node >= graph.size()) throw Error("node id " + std::to_string(node) + " not in graph");
  if (!graph.node(node).is_latent())
    throw Error("node '" + graph.node(node).name + "' is not an unobserved stochastic node");
  std::vector<double> values;
  bugs::evaluate_all(graph, current, values);
  const Transform t = transform_for(graph.node(node), values);
  values[node] = t.constrain(proposed);
  recompute(graph, graph.blanket(node).deterministic, values);
  return blanket_sum(graph, node, values) + t.log_jacobian(proposed);
}

Chain::Chain(const CompiledGraph& graph, const SamplerConfig& config, std::uint64_t stream_seed)
    : graph_(&graph),
      target_accept_(config.target_accept),
      adapt_interval_(config.adapt_interval),
      rng_(stream_seed) {
  const auto& latent = graph.latent();
  if (latent.empty()) throw ConfigError("model has no unobserved stochastic nodes to sample");
  for (const auto& [name, v] : config.initial)
    if (!graph.find(name) || !graph.node(*graph.find(name)).is_latent())
      throw ConfigError("initial value given for '" + name + "', which is not an unobserved node");

  values_.assign(graph.size(), 0.0);
  u_.reserve(latent.size());
  for (NodeId k = 0; k < graph.size(); ++k) {
    const Node& n = graph.node(k);
    if (n.kind == NodeKind::Deterministic) {
      values_[k] = bugs::evaluate(n.expr, values_);
      continue;
    }
    if (n.observed) {
      values_[k] = n.observed_value;
      continue;
    }
    const Transform t = transform_for(n, values_);
    double u = 0.0;
    if (const auto it = config.initial.find(n.name); it != config.initial.end()) {
      u = t.unconstrain(it->second);
      if (!std::isfinite(u))
        throw ConfigError("initial value for '" + n.name + "' is outside its support");
    } else {
      u = t.unconstrain(prior_draw(n, values_, rng_));
      const bool bounded = t.kind != Transform::Kind::Identity;
      if (!std::isfinite(u) || (bounded && std::abs(u) > kMaxInitialMagnitude))
        u = std::uniform_real_distribution<double>(-2.0, 2.0)(rng_);
    }
    values_[k] = t.constrain(u);
    u_.push_back(u);
  }
  scales_.assign(latent.size(), 1.0);
  accepted_.assign(latent.size(), 0);
  proposed_.assign(latent.size(), 0);
  window_accepts_.assign(latent.size(), 0);
  density_.assign(graph.size(), 0.0);
  for (NodeId k = 0; k < graph.size(); ++k)
    if (graph.node(k).kind == NodeKind::Stochastic)
      density_[k] = bugs::node_log_density(graph.node(k), values_[k], values_);
}

void Chain::sweep(bool adapt) {
  const auto& latent = graph_->latent();
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t j = 0; j < latent.size(); ++j) {
    const NodeId v = latent[j];
    const auto& blanket = graph_->blanket(v);
    const auto& dets = blanket.deterministic;
    const Transform t = transform_for(graph_->node(v), values_);

    // cached densities, summed in the same order as blanket_sum
    double current = density_[v];
    for (NodeId s : blanket.stochastic) current += density_[s];
    current += t.log_jacobian(u_[j]);

    const double u_new = u_[j] + scales_[j] * step(rng_);
    const double x_old = values_[v];
    saved_.resize(dets.size());
    for (std::size_t k = 0; k < dets.size(); ++k) saved_[k] = values_[dets[k]];
    values_[v] = t.constrain(u_new);
    recompute(*graph_, dets, values_);

    fresh_.assign(blanket.stochastic.size() + 1, 0.0);
    fresh_[0] = bugs::node_log_density(graph_->node(v), values_[v], values_);
    double proposal = fresh_[0];
    for (std::size_t k = 0; k < blanket.stochastic.size(); ++k) {
      if (proposal == -std::numeric_limits<double>::infinity()) break;
      const NodeId s = blanket.stochastic[k];
      fresh_[k + 1] = bugs::node_log_density(graph_->node(s), values_[s], values_);
      proposal += fresh_[k + 1];
    }
    proposal += t.log_jacobian(u_new);

    const double log_u = std::log(unif(rng_));
    ++proposed_[j];
    if (!std::isnan(proposal) && log_u < proposal - current) {
      u_[j] = u_new;
      density_[v] = fresh_[0];
      for (std::size_t k = 0; k < blanket.stochastic.size(); ++k) density_[blanket.stochastic[k]] = fresh_[k + 1];
      ++accepted_[j];
      ++window_accepts_[j];
    } else {
      values_[v] = x_old;
      for (std::size_t k = 0; k < dets.size(); ++k) values_[dets[k]] = saved_[k];
    }
  }
  ++sweeps_;
  if (adapt && sweeps_ % adapt_interval_ == 0) {
    for (std::size_t j = 0; j < latent.size(); ++j) {
      const double rate = static_cast<double>(window_accepts_[j]) / static_cast<double>(adapt_interval_);
      scales_[j] *= std::exp(rate > target_accept_ ? kAdaptFactor : -kAdaptFactor);
    }
  }
  if (sweeps_ % adapt_interval_ == 0) std::fill(window_accepts_.begin(), window_accepts_.end(), 0);
}

std::vector<double> Chain::latent_values() const {
  std::vector<double> out;
  out.reserve(u_.size());
  for (NodeId v : graph_->latent()) out.push_back(values_[v]);
  return out;
}

void Chain::reset_counts() {
  std::fill(accepted_.begin(), accepted_.end(), 0);
  std::fill(proposed_.begin(), proposed_.end(), 0);
}

Draws run_chains(const CompiledGraph& graph, const SamplerConfig& config) {
  config.validate();
  if (graph.latent().empty()) throw ConfigError("model has no unobserved stochastic nodes to sample");

  Draws draws;
  for (NodeId v : graph.latent()) draws.names.push_back(graph.node(v).name);
  draws.chains.resize(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);

  auto run_one = [&](std::size_t c) {
    try {
      Chain chain(graph, config, derive_seed(config.seed, c));
      const std::size_t kept = (config.iterations - config.burn_in) / config.thin;
      ChainDraws& out = draws.chains[c];
      out.samples.resize(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(graph.latent().size()));
      out.iterations.reserve(kept);
      Eigen::Index row = 0;
      for (std::size_t t = 1; t <= config.iterations; ++t) {
        chain.sweep(t <= config.burn_in);
        if (t == config.burn_in) chain.reset_counts();
        if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
          const auto vals = chain.latent_values();
          for (std::size_t j = 0; j < vals.size(); ++j) out.samples(row, static_cast<Eigen::Index>(j)) = vals[j];
          out.iterations.push_back(t);
          ++row;
        }
      }
      out.scales = chain.scales();
      for (std::size_t j = 0; j < chain.accepted().size(); ++j)
        out.accept_rate.push_back(chain.proposed()[j]
                                      ? double(chain.accepted()[j]) / double(chain.proposed()[j])
                                      : 0.0);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  const std::size_t workers = std::min<std::size_t>(
      config.n_chains, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < config.n_chains; ++c) run_one(c);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < config.n_chains; c += workers) run_one(c);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return draws;
}

}  // namespace darkworlds::mcmc
