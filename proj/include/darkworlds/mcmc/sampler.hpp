#ifndef DARKWORLDS_MCMC_SAMPLER_HPP
#define DARKWORLDS_MCMC_SAMPLER_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "darkworlds/bugs/graph.hpp"
#include "darkworlds/random.hpp"

namespace darkworlds::mcmc {

struct SamplerConfig {
  std::size_t iterations = 2000;  ///< sweeps, burn-in included
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  std::size_t n_chains = 4;
  std::uint64_t seed = 0;
  double target_accept = 0.44;
  std::size_t adapt_interval = 50;
  /// Constrained starting values by node name; other nodes start from
  /// prior draws.
  std::map<std::string, double> initial;

  void validate() const;
};

/// Multiplicative step applied to a proposal scale at each adaptation.
inline constexpr double kAdaptFactor = 0.05;

/// Log-density of a latent node's full conditional, up to a constant, at
/// `proposed` (unconstrained), with every other node at `current`
/// (constrained, aligned with graph.latent()). Includes the log-Jacobian
/// of the node's transform.
double full_conditional_logdensity(const bugs::CompiledGraph& graph, bugs::NodeId node,
                                   double proposed, std::span<const double> current);

/// One Metropolis-within-Gibbs chain. Owns its RNG and node values.
class Chain {
public:
  Chain(const bugs::CompiledGraph& graph, const SamplerConfig& config, std::uint64_t stream_seed);

  /// One pass over all latent nodes in node order. Adapts scales every
  /// adapt_interval sweeps when `adapt` is set.
  void sweep(bool adapt);

  /// Constrained latent values, aligned with graph.latent().
  std::vector<double> latent_values() const;
  const std::vector<double>& unconstrained() const { return u_; }
  const std::vector<double>& scales() const { return scales_; }
  const std::vector<std::uint64_t>& accepted() const { return accepted_; }
  const std::vector<std::uint64_t>& proposed() const { return proposed_; }
  void reset_counts();

private:
  const bugs::CompiledGraph* graph_;
  double target_accept_;
  std::size_t adapt_interval_;
  Rng rng_;
  std::vector<double> values_;  // every node, constrained
  std::vector<double> u_;
  std::vector<double> scales_;
  std::vector<std::uint64_t> accepted_;
  std::vector<std::uint64_t> proposed_;
  std::vector<std::uint64_t> window_accepts_;
  std::size_t sweeps_ = 0;
  std::vector<double> saved_;
  std::vector<double> density_;  // log-density of each stochastic node at values_
  std::vector<double> fresh_;
};

struct ChainDraws {
  std::vector<std::size_t> iterations;  ///< 1-based sweep number of each draw
  Eigen::MatrixXd samples;              ///< draws x latent nodes, constrained
  std::vector<double> accept_rate;      ///< per node, post burn-in
  std::vector<double> scales;           ///< frozen proposal scales
};

struct Draws {
  std::vector<std::string> names;  ///< latent node names
  std::vector<ChainDraws> chains;

  std::size_t total() const;
};

/// Runs config.n_chains independent chains; chain c uses the stream
/// derive_seed(config.seed, c). Output does not depend on scheduling.
Draws run_chains(const bugs::CompiledGraph& graph, const SamplerConfig& config);

}  // namespace darkworlds::mcmc

#endif  // DARKWORLDS_MCMC_SAMPLER_HPP
