#include "darkworlds/lensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace darkworlds {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gaussian_log(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - r * r / (2.0 * variance);
}

// Summation order fixed independently of the caller's halo order, so the
// densities are exactly invariant under relabelling.
std::vector<Halod> canonical_order(std::span<const Halod> halos) {
  std::vector<Halod> sorted(halos.begin(), halos.end());
  std::sort(sorted.begin(), sorted.end(), [](const Halod& a, const Halod& b) {
    if (a.loc.x() != b.loc.x()) return a.loc.x() < b.loc.x();
    if (a.loc.y() != b.loc.y()) return a.loc.y() < b.loc.y();
    return a.mass < b.mass;
  });
  return sorted;
}

}  // namespace

double log_likelihood(const Sky& sky, std::span<const Halod> unordered, const LensParams& params) {
  const std::vector<Halod> halos = canonical_order(unordered);
  double total = 0.0;
  for (const auto& g : sky.galaxies) {
    Ellipticityd mean;
    try {
      mean = predicted_ellipticity_mean(g.loc, std::span<const Halod>(halos), params);
    } catch (const SingularityError&) {
      return kNegInf;
    }
    total += gaussian_log(g.ell.e1, mean.e1, params.sigma2);
    total += gaussian_log(g.ell.e2, mean.e2, params.sigma2);
  }
  return total;
}

double log_prior(std::span<const Halod> unordered, const LensParams& params) {
  const std::vector<Halod> halos = canonical_order(unordered);
  const double width = params.field_hi - params.field_lo;
  const double a = params.gamma_shape;
  const double b = params.gamma_rate;
  double total = 0.0;
  for (const auto& h : halos) {
    for (double c : {h.loc.x(), h.loc.y()}) {
      if (!(c >= params.field_lo && c <= params.field_hi)) return kNegInf;
      total -= std::log(width);
    }
    if (!(h.mass > 0) || !std::isfinite(h.mass)) return kNegInf;
    total += a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(h.mass) - b * h.mass;
  }
  return total;
}

double log_posterior(const Sky& sky, std::span<const Halod> halos, const LensParams& params) {
  const double prior = log_prior(halos, params);
  if (prior == kNegInf) return kNegInf;
  return log_likelihood(sky, halos, params) + prior;
}

}  // namespace darkworlds
