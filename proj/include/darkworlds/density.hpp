#ifndef DARKWORLDS_DENSITY_HPP
#define DARKWORLDS_DENSITY_HPP

#include <cmath>
#include <limits>
#include <numbers>

// Log-densities in BUGS parameterization. Out-of-support and invalid
// parameters give -inf, never NaN.

namespace darkworlds::density {

template <typename Scalar>
constexpr Scalar neg_inf() {
  return -std::numeric_limits<Scalar>::infinity();
}

/// Normal with mean and precision (inverse variance).
template <typename Scalar>
Scalar normal_log(Scalar x, Scalar mean, Scalar precision) {
  using std::log;
  if (!(precision > 0) || !std::isfinite(mean) || !std::isfinite(x) || !std::isfinite(precision))
    return neg_inf<Scalar>();
  const Scalar r = x - mean;
  return Scalar(0.5) * (log(precision) - log(Scalar(2) * std::numbers::pi_v<Scalar>)) -
         Scalar(0.5) * precision * r * r;
}

/// Gamma with shape and rate; support x > 0.
template <typename Scalar>
Scalar gamma_log(Scalar x, Scalar shape, Scalar rate) {
  using std::lgamma;
  using std::log;
  if (!(shape > 0) || !(rate > 0) || !std::isfinite(shape) || !std::isfinite(rate))
    return neg_inf<Scalar>();
  if (!(x > 0) || !std::isfinite(x)) return neg_inf<Scalar>();
  return shape * log(rate) - lgamma(shape) + (shape - 1) * log(x) - rate * x;
}

/// Uniform on the closed interval [lo, hi].
template <typename Scalar>
Scalar uniform_log(Scalar x, Scalar lo, Scalar hi) {
  using std::log;
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) return neg_inf<Scalar>();
  if (!(x >= lo && x <= hi)) return neg_inf<Scalar>();
  return -log(hi - lo);
}

}  // namespace darkworlds::density

#endif  // DARKWORLDS_DENSITY_HPP
