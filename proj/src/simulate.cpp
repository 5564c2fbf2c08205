#include "darkworlds/simulate.hpp"

#include <cmath>

#include "darkworlds/random.hpp"

namespace darkworlds {

void SimConfig::validate() const {
  if (halos.empty() || halos.size() > static_cast<std::size_t>(kMaxHalos))
    throw ConfigError("a sky needs 1 to 3 halos, got " + std::to_string(halos.size()));
  if (n_galaxies && *n_galaxies < 1) throw ConfigError("n_galaxies must be at least 1");
  if (!(field_size > 0)) throw ConfigError("field_size must be positive");
  if (!(min_halo_clearance >= lens.min_dist))
    throw ConfigError("min_halo_clearance must not be below the singularity guard");
  for (const auto& h : halos) {
    if (!(h.mass >= 0) || !std::isfinite(h.mass)) throw ConfigError("halo mass must be >= 0");
    if (!h.loc.allFinite()) throw ConfigError("halo location must be finite");
  }
  lens.validate();
}

namespace {

// Standard normal conditioned on z >= lo.
double normal_tail(double lo, Rng& rng) {
  std::normal_distribution<double> std_normal;
  if (lo <= 0.0) {
    for (;;)
      if (const double z = std_normal(rng); z >= lo) return z;
  }
  const double alpha = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  std::exponential_distribution<double> expo(alpha);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double z = lo + expo(rng);
    if (unit(rng) <= std::exp(-0.5 * (z - alpha) * (z - alpha))) return z;
  }
}

}  // namespace

Ellipticityd sample_unit_disc(const Ellipticityd& mean, double sigma, Rng& rng) {
  const double m = mean.magnitude();
  const double c = m > 0 ? mean.e1 / m : 1.0;
  const double s = m > 0 ? mean.e2 / m : 0.0;
  std::normal_distribution<double> across(0.0, sigma);
  // a runs along the mean direction, b across it; a <= 1 is drawn
  // exactly, the remaining disc constraint by rejection.
  for (;;) {
    const double a = m - sigma * normal_tail((m - 1.0) / sigma, rng);
    const double b = across(rng);
    if (a * a + b * b < 1.0) return {a * c - b * s, a * s + b * c};
  }
}

Sky simulate_sky(const SimConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const int n = config.n_galaxies
                    ? *config.n_galaxies
                    : std::uniform_int_distribution<int>(kMinCompetitionGalaxies,
                                                         kMaxCompetitionGalaxies)(rng);
  std::uniform_real_distribution<double> coord(0.0, config.field_size);
  std::normal_distribution<double> noise(0.0, std::sqrt(config.lens.sigma2));
  const std::span<const Halod> halos(config.halos);

  Sky sky;
  sky.id = config.sky_id;
  sky.field_size = config.field_size;
  sky.galaxies.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Galaxy g;
    g.id = i + 1;
    bool clear = false;
    while (!clear) {
      g.loc = {coord(rng), coord(rng)};
      clear = true;
      for (const auto& h : halos)
        if ((g.loc - h.loc).norm() < config.min_halo_clearance) clear = false;
    }
    const Ellipticityd mean = predicted_ellipticity_mean(g.loc, halos, config.lens);
    Ellipticityd e;
    bool inside = false;
    for (int attempt = 0; attempt < kMaxNoiseRedraws && !inside; ++attempt) {
      e = {mean.e1 + noise(rng), mean.e2 + noise(rng)};
      inside = e.e1 * e.e1 + e.e2 * e.e2 < 1.0;
    }
    g.ell = inside ? e : sample_unit_disc(mean, std::sqrt(config.lens.sigma2), rng);
    sky.galaxies.push_back(g);
  }
  return sky;
}

std::vector<BatchSky> simulate_batch(int n_skies, std::uint64_t seed) {
  if (n_skies < 1) throw ConfigError("batch needs at least one sky");
  std::vector<BatchSky> out;
  out.reserve(static_cast<std::size_t>(n_skies));
  for (int k = 1; k <= n_skies; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::uniform_real_distribution<double> coord(0.0, kFieldSize);
    std::uniform_real_distribution<double> mass(kBatchMassLo, kBatchMassHi);
    const int n_halos = std::uniform_int_distribution<int>(1, kMaxHalos)(rng);
    SimConfig cfg;
    cfg.sky_id = k;
    for (int h = 0; h < n_halos; ++h) {
      Halod halo;
      halo.loc = {coord(rng), coord(rng)};
      halo.mass = mass(rng);
      cfg.halos.push_back(halo);
    }
    cfg.seed = rng();
    out.push_back({simulate_sky(cfg), cfg.halos});
  }
  return out;
}

}  // namespace darkworlds
