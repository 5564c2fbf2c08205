#ifndef DARKWORLDS_LENSING_HPP
#define DARKWORLDS_LENSING_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "darkworlds/error.hpp"

namespace darkworlds {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2d = Point2<double>;

/// Two-component galaxy shape: e1 along the x-axis, e2 along the 45 degree diagonal.
template <typename Scalar>
struct Ellipticity {
  Scalar e1{0};
  Scalar e2{0};

  Ellipticity& operator+=(const Ellipticity& o) {
    e1 += o.e1;
    e2 += o.e2;
    return *this;
  }
  friend Ellipticity operator+(Ellipticity a, const Ellipticity& b) { return a += b; }
  friend Ellipticity operator*(Scalar s, const Ellipticity& e) { return {s * e.e1, s * e.e2}; }
  friend bool operator==(const Ellipticity&, const Ellipticity&) = default;

  Scalar magnitude() const { return std::hypot(e1, e2); }
};

template <typename Scalar>
struct Halo {
  Point2<Scalar> loc = Point2<Scalar>::Zero();
  Scalar mass{0};

  friend bool operator==(const Halo&, const Halo&) = default;
};

using Ellipticityd = Ellipticity<double>;
using Halod = Halo<double>;

struct Galaxy {
  int id = 0;
  Point2d loc = Point2d::Zero();
  Ellipticityd ell;

  friend bool operator==(const Galaxy&, const Galaxy&) = default;
};

inline constexpr double kFieldSize = 4200.0;

struct Sky {
  int id = 0;
  std::vector<Galaxy> galaxies;
  double field_size = kFieldSize;

  friend bool operator==(const Sky&, const Sky&) = default;
};

/// Noise, prior and guard constants of the halo model.
template <typename Scalar>
struct LensModelParams {
  Scalar sigma2 = Scalar(0.05);  ///< per-component ellipticity variance
  Scalar field_lo = Scalar(0);
  Scalar field_hi = Scalar(kFieldSize);
  Scalar gamma_shape = Scalar(0.001);
  Scalar gamma_rate = Scalar(0.001);
  Scalar min_dist = Scalar(1e-6);  ///< pixels; closer galaxies are singular

  /// Throws ConfigError when an invariant is violated.
  void validate() const {
    if (!(sigma2 > 0)) throw ConfigError("sigma2 must be positive");
    if (!(field_lo < field_hi)) throw ConfigError("field_lo must be below field_hi");
    if (!(gamma_shape > 0) || !(gamma_rate > 0))
      throw ConfigError("gamma shape and rate must be positive");
    if (!(min_dist > 0)) throw ConfigError("min_dist must be positive");
  }
};

using LensParams = LensModelParams<double>;

/// Mean ellipticity induced on a galaxy by one halo: tangential, with
/// magnitude mass / distance.
template <typename Scalar>
Ellipticity<Scalar> tangential_shear(const Point2<Scalar>& galaxy_loc, const Halo<Scalar>& halo,
                                     const LensModelParams<Scalar>& params) {
  using std::atan2;
  using std::cos;
  using std::sin;
  const Point2<Scalar> delta = galaxy_loc - halo.loc;
  const Scalar dist = delta.norm();
  if (!(dist >= params.min_dist))
    throw SingularityError("galaxy within " + std::to_string(double(params.min_dist)) +
                           " px of a halo centre");
  const Scalar phi = atan2(delta.y(), delta.x());
  const Scalar force = halo.mass / dist;
  return {-force * cos(Scalar(2) * phi), -force * sin(Scalar(2) * phi)};
}

template <typename Scalar>
Ellipticity<Scalar> predicted_ellipticity_mean(const Point2<Scalar>& galaxy_loc,
                                               std::span<const Halo<Scalar>> halos,
                                               const LensModelParams<Scalar>& params) {
  Ellipticity<Scalar> total;
  for (const auto& h : halos) total += tangential_shear(galaxy_loc, h, params);
  return total;
}

// Log-densities of the halo model. Singular configurations and
// out-of-support values give -inf.

double log_likelihood(const Sky& sky, std::span<const Halod> halos, const LensParams& params = {});
double log_prior(std::span<const Halod> halos, const LensParams& params = {});
double log_posterior(const Sky& sky, std::span<const Halod> halos, const LensParams& params = {});

}  // namespace darkworlds

#endif  // DARKWORLDS_LENSING_HPP
