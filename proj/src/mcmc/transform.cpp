#include "darkworlds/mcmc/transform.hpp"

#include <algorithm>

namespace darkworlds::mcmc {

namespace {

// log(1 + exp(v)) without overflow
double softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

}  // namespace

double Transform::constrain(double u) const {
  switch (kind) {
    case Kind::Identity: return u;
    case Kind::Log: return std::exp(u);
    case Kind::Logit: {
      const double s = u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
      return lo + (hi - lo) * s;
    }
  }
  return u;
}

double Transform::unconstrain(double x) const {
  switch (kind) {
    case Kind::Identity: return x;
    case Kind::Log: return std::log(x);
    case Kind::Logit: {
      const double p = (x - lo) / (hi - lo);
      return std::log(p) - std::log1p(-p);
    }
  }
  return x;
}

double Transform::log_jacobian(double u) const {
  switch (kind) {
    case Kind::Identity: return 0.0;
    case Kind::Log: return u;
    case Kind::Logit: return std::log(hi - lo) - softplus(u) - softplus(-u);
  }
  return 0.0;
}

Transform transform_for(const bugs::Node& node, std::span<const double> values) {
  Transform t;
  switch (node.dist) {
    case bugs::DistKind::Normal: t.kind = Transform::Kind::Identity; break;
    case bugs::DistKind::Gamma: t.kind = Transform::Kind::Log; break;
    case bugs::DistKind::Uniform:
      t.kind = Transform::Kind::Logit;
      t.lo = bugs::evaluate(node.params[0], values);
      t.hi = bugs::evaluate(node.params[1], values);
      break;
  }
  return t;
}

}  // namespace darkworlds::mcmc
