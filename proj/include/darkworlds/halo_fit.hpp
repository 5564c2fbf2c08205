#ifndef DARKWORLDS_HALO_FIT_HPP
#define DARKWORLDS_HALO_FIT_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "darkworlds/cmaes.hpp"
#include "darkworlds/lensing.hpp"

namespace darkworlds {

struct FitResult {
  std::vector<Halod> halos;  ///< sorted by x
  double neg_log_posterior = 0.0;  ///< at the returned halos
  double objective = 0.0;          ///< fit_objective at the returned halos
  std::size_t evaluations = 0;
  std::size_t restarts_used = 0;
  bool converged = false;
};

/// Defaults for halo fitting: sigma0 0.5 in transformed coordinates,
/// 5 restarts.
CmaesConfig default_fit_config(int num_halos);

/// Search vector layout, per halo: logit-scaled x, logit-scaled y, log mass.
std::vector<Halod> decode_halos(const Eigen::VectorXd& z, const LensParams& params);
Eigen::VectorXd encode_halos(const std::vector<Halod>& halos, const LensParams& params);

/// Negative log-posterior of the log-mass parameterisation: the
/// log-posterior at decode_halos(z) plus sum of log masses. +inf outside
/// the support.
double fit_objective(const Sky& sky, const Eigen::VectorXd& z, const LensParams& params);

/// MAP estimate of num_halos (1..3) halos by minimising fit_objective;
/// best of config.restarts restarts from prior draws.
FitResult fit_halos(const Sky& sky, int num_halos, const LensParams& params, const CmaesConfig& config);

/// A single restart of fit_halos; fit_halos returns the first minimum of
/// these over restart = 0 .. restarts-1.
FitResult fit_halos_restart(const Sky& sky, int num_halos, const LensParams& params,
                            const CmaesConfig& config, std::size_t restart);

/// {"halos":[{"x":..,"y":..,"mass":..}],"neg_log_posterior":..,"evaluations":..,"converged":..}
std::string fit_json(const FitResult& fit);
FitResult parse_fit_json(const std::string& text);

}  // namespace darkworlds

#endif  // DARKWORLDS_HALO_FIT_HPP
