#include "darkworlds/halo_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "darkworlds/random.hpp"
#include "darkworlds/sky_io.hpp"

namespace darkworlds {

namespace {

double logistic(double u) {
  return u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

void check_count(int num_halos) {
  if (num_halos < 1 || num_halos > kMaxHalos)
    throw ConfigError("number of halos must be between 1 and 3, got " + std::to_string(num_halos));
}

// Same fallback as the sampler: a vague gamma prior draw is often 0.
constexpr double kMaxInitialMagnitude = 20.0;

}  // namespace

CmaesConfig default_fit_config(int num_halos) {
  CmaesConfig c;
  c.sigma0 = 0.5;
  c.max_evals = 6000;
  c.f_tol = 1e-10;
  c.x_tol = 1e-10;
  c.restarts = 5;
  return c;
}

std::vector<Halod> decode_halos(const Eigen::VectorXd& z, const LensParams& params) {
  const double width = params.field_hi - params.field_lo;
  std::vector<Halod> halos(static_cast<std::size_t>(z.size() / 3));
  for (std::size_t h = 0; h < halos.size(); ++h) {
    const auto k = static_cast<Eigen::Index>(3 * h);
    halos[h].loc = {params.field_lo + width * logistic(z[k]), params.field_lo + width * logistic(z[k + 1])};
    halos[h].mass = std::exp(z[k + 2]);
  }
  return halos;
}

Eigen::VectorXd encode_halos(const std::vector<Halod>& halos, const LensParams& params) {
  const double width = params.field_hi - params.field_lo;
  Eigen::VectorXd z(static_cast<Eigen::Index>(3 * halos.size()));
  for (std::size_t h = 0; h < halos.size(); ++h) {
    const auto k = static_cast<Eigen::Index>(3 * h);
    z[k] = logit((halos[h].loc.x() - params.field_lo) / width);
    z[k + 1] = logit((halos[h].loc.y() - params.field_lo) / width);
    z[k + 2] = std::log(halos[h].mass);
  }
  return z;
}

double fit_objective(const Sky& sky, const Eigen::VectorXd& z, const LensParams& params) {
  const auto halos = decode_halos(z, params);
  double log_jacobian = 0.0;
  for (Eigen::Index k = 2; k < z.size(); k += 3) log_jacobian += z[k];
  const double lp = log_posterior(sky, halos, params);
  if (lp == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  return -(lp + log_jacobian);
}

FitResult fit_halos_restart(const Sky& sky, int num_halos, const LensParams& params,
                            const CmaesConfig& config, std::size_t restart) {
  check_count(num_halos);
  params.validate();
  const std::size_t n = 3 * static_cast<std::size_t>(num_halos);
  config.validate(n);

  Rng rng(derive_seed(config.seed, restart));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> mass_prior(params.gamma_shape, 1.0 / params.gamma_rate);
  std::uniform_real_distribution<double> fallback(-2.0, 2.0);
  Eigen::VectorXd x0(static_cast<Eigen::Index>(n));
  for (int h = 0; h < num_halos; ++h) {
    const auto k = static_cast<Eigen::Index>(3 * h);
    x0[k] = logit(unit(rng));
    x0[k + 1] = logit(unit(rng));
    const double v = std::log(mass_prior(rng));
    x0[k + 2] = (std::isfinite(v) && std::abs(v) <= kMaxInitialMagnitude) ? v : fallback(rng);
  }

  CmaesConfig single = config;
  single.restarts = 1;
  single.seed = derive_seed(config.seed ^ 0x5bd1e995ULL, restart);
  const auto objective = [&](const Eigen::VectorXd& z) { return fit_objective(sky, z, params); };
  const CmaesResult res = cmaes_minimize(objective, x0, single);

  FitResult fit;
  fit.halos = decode_halos(res.x, params);
  std::sort(fit.halos.begin(), fit.halos.end(),
            [](const Halod& a, const Halod& b) { return a.loc.x() < b.loc.x(); });
  fit.objective = res.f;
  fit.neg_log_posterior = -log_posterior(sky, fit.halos, params);
  fit.evaluations = res.evaluations;
  fit.restarts_used = 1;
  fit.converged = res.converged;
  return fit;
}

FitResult fit_halos(const Sky& sky, int num_halos, const LensParams& params, const CmaesConfig& config) {
  check_count(num_halos);
  config.validate(3 * static_cast<std::size_t>(num_halos));
  FitResult best;
  std::size_t evaluations = 0;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    FitResult res = fit_halos_restart(sky, num_halos, params, config, r);
    evaluations += res.evaluations;
    if (r == 0 || res.objective < best.objective) best = std::move(res);
  }
  best.evaluations = evaluations;
  best.restarts_used = config.restarts;
  return best;
}

std::string fit_json(const FitResult& fit) {
  nlohmann::ordered_json doc;
  auto halos = nlohmann::ordered_json::array();
  for (const auto& h : fit.halos) {
    nlohmann::ordered_json j;
    j["x"] = h.loc.x();
    j["y"] = h.loc.y();
    j["mass"] = h.mass;
    halos.push_back(std::move(j));
  }
  doc["halos"] = std::move(halos);
  if (std::isfinite(fit.neg_log_posterior))
    doc["neg_log_posterior"] = fit.neg_log_posterior;
  else
    doc["neg_log_posterior"] = nullptr;
  doc["evaluations"] = fit.evaluations;
  doc["converged"] = fit.converged;
  return doc.dump(2) + "\n";
}

FitResult parse_fit_json(const std::string& text) {
  FitResult fit;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& j : doc.at("halos")) {
      Halod h;
      h.loc = {j.at("x").get<double>(), j.at("y").get<double>()};
      h.mass = j.at("mass").get<double>();
      fit.halos.push_back(h);
    }
    const auto& nlp = doc.at("neg_log_posterior");
    fit.neg_log_posterior = nlp.is_null() ? std::numeric_limits<double>::infinity() : nlp.get<double>();
    fit.evaluations = doc.at("evaluations").get<std::size_t>();
    fit.converged = doc.at("converged").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed fit JSON: ") + e.what());
  }
  return fit;
}

}  // namespace darkworlds
