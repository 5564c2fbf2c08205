#ifndef DARKWORLDS_CMAES_HPP
#define DARKWORLDS_CMAES_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Core>

namespace darkworlds {

/// Settings of the evolution strategy. Constants not listed here follow
/// the standard defaults:
///   mu = lambda / 2,  w_i ∝ ln(lambda/2 + 0.5) - ln i,  mu_eff = 1 / sum w_i^2
///   c_c = (4 + mu_eff/n) / (n + 4 + 2 mu_eff/n)
///   c_s = (mu_eff + 2) / (n + mu_eff + 5)
///   c_1 = 2 / ((n + 1.3)^2 + mu_eff)
///   c_mu = min(1 - c_1, 2 (mu_eff - 2 + 1/mu_eff) / ((n + 2)^2 + mu_eff))
///   d_s = 1 + 2 max(0, sqrt((mu_eff - 1)/(n + 1)) - 1) + c_s
struct CmaesConfig {
  std::optional<int> lambda;  ///< default 4 + floor(3 ln n)
  double sigma0 = 0.5;
  std::size_t max_evals = 10000;  ///< per restart
  double f_tol = 1e-15;
  double x_tol = 1e-12;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;

  int population(std::size_t n) const;
  void validate(std::size_t n) const;
};

struct CmaesResult {
  Eigen::VectorXd x;
  double f = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;  ///< stopped on f_tol or x_tol rather than the budget
  std::size_t restarts_used = 0;
};

/// State after each generation, for tracing and invariant checks.
struct CmaesGeneration {
  std::size_t generation = 0;
  std::size_t evaluations = 0;
  Eigen::VectorXd mean;
  double sigma = 0.0;
  double best_f = 0.0;  ///< best ever in this restart
  double min_eigenvalue = 0.0;
};

/// Objective to minimise. +inf marks an infeasible point; NaN is an error.
using Objective = std::function<double(const Eigen::VectorXd&)>;
using GenerationObserver = std::function<void(const CmaesGeneration&)>;

/// Covariance matrix adaptation evolution strategy (rank-mu and rank-one
/// updates, cumulative step-size adaptation). Restart r is seeded with
/// derive_seed(config.seed, r) and starts from x0; the best result wins.
CmaesResult cmaes_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                           const CmaesConfig& config, const GenerationObserver& observer = {});

}  // namespace darkworlds

#endif  // DARKWORLDS_CMAES_HPP
