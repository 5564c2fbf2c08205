#ifndef DARKWORLDS_SIMULATE_HPP
#define DARKWORLDS_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "darkworlds/lensing.hpp"
#include "darkworlds/random.hpp"
#include "darkworlds/sky_io.hpp"

namespace darkworlds {

struct SimConfig {
  std::optional<int> n_galaxies;  ///< drawn uniformly from [300, 740] when unset
  std::vector<Halod> halos;       ///< 1..3
  std::uint64_t seed = 0;
  int sky_id = 0;
  double field_size = kFieldSize;
  double min_halo_clearance = 1.0;  ///< pixels
  LensParams lens;

  void validate() const;
};

inline constexpr int kMinCompetitionGalaxies = 300;
inline constexpr int kMaxCompetitionGalaxies = 740;

/// Plain noise redraws tried before switching to sample_unit_disc. Only
/// exhausted where the mean shear is at or beyond |e| = 1.
inline constexpr int kMaxNoiseRedraws = 1000;

/// Draws from Normal(mean, sigma^2 I) conditioned on |e| < 1, the limit
/// of redrawing until the draw lands in the unit disc. Uses a one-sided
/// normal tail along the mean direction, so it stays fast when |mean| >> 1.
Ellipticityd sample_unit_disc(const Ellipticityd& mean, double sigma, Rng& rng);

/// Synthetic sky: uniform galaxy positions, ellipticity = lensing mean +
/// Normal(0, sigma2) per component, redrawn until |e| < 1.
Sky simulate_sky(const SimConfig& config);

/// Default mass range of generated halos (dimensionless).
inline constexpr double kBatchMassLo = 100.0;
inline constexpr double kBatchMassHi = 1500.0;

struct BatchSky {
  Sky sky;
  std::vector<Halod> halos;
};

/// Competition-style batch: per sky, 1-3 halos placed uniformly with
/// masses in [kBatchMassLo, kBatchMassHi] and 300-740 galaxies. Sky k
/// (1-based id) depends only on (seed, k).
std::vector<BatchSky> simulate_batch(int n_skies, std::uint64_t seed);

}  // namespace darkworlds

#endif  // DARKWORLDS_SIMULATE_HPP
