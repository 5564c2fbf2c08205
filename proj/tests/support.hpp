// Independent oracles and random generators shared by the unit tests and
// the acceptance runner. Nothing here calls into the library's density
// code.
#ifndef DARKWORLDS_TESTS_SUPPORT_HPP
#define DARKWORLDS_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "darkworlds/lensing.hpp"

namespace testing {

constexpr double kPi = std::numbers::pi;

// log N(x | mean, variance)
inline double gauss_logpdf(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * std::log(2.0 * kPi * variance) - r * r / (2.0 * variance);
}

// log Gamma(x | shape, rate), written from the density b^a x^(a-1) e^(-bx) / Γ(a).
inline double gamma_logpdf(double x, double shape, double rate) {
  return std::log(std::pow(rate, shape) * std::pow(x, shape - 1.0) * std::exp(-rate * x) /
                  std::tgamma(shape));
}

// Shear of one halo from the geometry: magnitude m/d, orientation
// perpendicular to the halo-galaxy ray (angle phi + 90 degrees, spin 2).
inline std::pair<double, double> shear_oracle(double gx, double gy, double hx, double hy, double m) {
  const double dx = gx - hx, dy = gy - hy;
  const double d = std::sqrt(dx * dx + dy * dy);
  const double c = dx / d, s = dy / d;  // cos phi, sin phi
  // cos 2(phi + pi/2) = -(c^2 - s^2), sin 2(phi + pi/2) = -2cs
  return {-(m / d) * (c * c - s * s), -(m / d) * (2.0 * c * s)};
}

inline double model_log_posterior_oracle(const darkworlds::Sky& sky,
                                         const std::vector<darkworlds::Halod>& halos) {
  double ll = 0.0;
  for (const auto& g : sky.galaxies) {
    double m1 = 0.0, m2 = 0.0;
    for (const auto& h : halos) {
      const auto [a, b] = shear_oracle(g.loc.x(), g.loc.y(), h.loc.x(), h.loc.y(), h.mass);
      m1 += a;
      m2 += b;
    }
    ll += gauss_logpdf(g.ell.e1, m1, 0.05) + gauss_logpdf(g.ell.e2, m2, 0.05);
  }
  double lp = 0.0;
  for (const auto& h : halos) {
    if (h.loc.x() < 0 || h.loc.x() > 4200 || h.loc.y() < 0 || h.loc.y() > 4200 || h.mass <= 0)
      return -std::numeric_limits<double>::infinity();
    lp += 2.0 * std::log(1.0 / 4200.0) + gamma_logpdf(h.mass, 0.001, 0.001);
  }
  return ll + lp;
}

// Hand-rolled generators.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(rng); }

  darkworlds::Point2d point(double lo = 0.0, double hi = 4200.0) { return {uniform(lo, hi), uniform(lo, hi)}; }

  darkworlds::Halod halo(double mass_lo = 1.0, double mass_hi = 1500.0) {
    darkworlds::Halod h;
    h.loc = point();
    h.mass = uniform(mass_lo, mass_hi);
    return h;
  }

  std::vector<darkworlds::Halod> halos(int n) {
    std::vector<darkworlds::Halod> out;
    for (int k = 0; k < n; ++k) out.push_back(halo());
    return out;
  }

  // Galaxies at least `clearance` px from every halo, ellipticities inside the unit disc.
  darkworlds::Sky sky(int n, const std::vector<darkworlds::Halod>& halos, double clearance = 1.0) {
    darkworlds::Sky s;
    s.id = integer(1, 1000);
    for (int i = 0; i < n; ++i) {
      darkworlds::Galaxy g;
      g.id = i + 1;
      bool ok = false;
      while (!ok) {
        g.loc = point();
        ok = std::all_of(halos.begin(), halos.end(),
                         [&](const darkworlds::Halod& h) { return (g.loc - h.loc).norm() >= clearance; });
      }
      do {
        g.ell = {normal(0.0, 0.3), normal(0.0, 0.3)};
      } while (g.ell.magnitude() >= 1.0);
      s.galaxies.push_back(g);
    }
    return s;
  }
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string model_path() { return std::string(DARKWORLDS_MODEL_DIR) + "/darkmatter.bug"; }

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

// Critical value of the two-sample KS statistic at significance alpha.
inline double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

}  // namespace testing

#endif  // DARKWORLDS_TESTS_SUPPORT_HPP
