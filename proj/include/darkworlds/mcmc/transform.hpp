#ifndef DARKWORLDS_MCMC_TRANSFORM_HPP
#define DARKWORLDS_MCMC_TRANSFORM_HPP

#include <cmath>
#include <span>

#include "darkworlds/bugs/graph.hpp"

namespace darkworlds::mcmc {

/// Map between a node's support and the real line.
///   Normal:       x = u
///   Gamma:        x = exp(u)
///   Uniform(a,b): x = a + (b - a) / (1 + exp(-u))
struct Transform {
  enum class Kind { Identity, Log, Logit };
  Kind kind = Kind::Identity;
  double lo = 0.0;
  double hi = 1.0;

  double constrain(double u) const;
  double unconstrain(double x) const;
  /// log |dx/du|
  double log_jacobian(double u) const;
};

/// Transform of a stochastic node; uniform bounds are evaluated from the
/// current parent values.
Transform transform_for(const bugs::Node& node, std::span<const double> values);

}  // namespace darkworlds::mcmc

#endif  // DARKWORLDS_MCMC_TRANSFORM_HPP
