#include "darkworlds/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "darkworlds/error.hpp"
#include "darkworlds/random.hpp"

namespace darkworlds {

int CmaesConfig::population(std::size_t n) const {
  if (lambda) return *lambda;
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

void CmaesConfig::validate(std::size_t n) const {
  if (n == 0) throw ConfigError("CMA-ES needs at least one dimension");
  if (population(n) < 2) throw ConfigError("population size must be at least 2");
  if (!(sigma0 > 0)) throw ConfigError("sigma0 must be positive");
  if (max_evals == 0) throw ConfigError("max_evals must be positive");
  if (restarts == 0) throw ConfigError("restarts must be at least 1");
  if (!(f_tol >= 0) || !(x_tol >= 0)) throw ConfigError("tolerances must be non-negative");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxCondition = 1e14;

CmaesResult run_once(const Objective& objective, const Eigen::VectorXd& x0,
                     const CmaesConfig& config, std::uint64_t seed,
                     const GenerationObserver& observer) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const auto n = static_cast<Eigen::Index>(x0.size());
  const double nd = static_cast<double>(n);
  const int lambda = config.population(x0.size());
  const int mu = lambda / 2;

  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(lambda / 2.0 + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
  const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
  const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
  const double cmu =
      std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  const std::size_t history_len =
      10 + static_cast<std::size_t>(std::ceil(30.0 * nd / static_cast<double>(lambda)));

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  VectorXd mean = x0;
  double sigma = config.sigma0;
  VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
  MatrixXd C = MatrixXd::Identity(n, n);
  MatrixXd B = MatrixXd::Identity(n, n);
  VectorXd D = VectorXd::Ones(n);

  CmaesResult best;
  best.x = x0;
  best.f = kInf;
  std::deque<double> history;

  MatrixXd y(n, lambda);
  std::vector<double> f(static_cast<std::size_t>(lambda));
  std::vector<int> order(static_cast<std::size_t>(lambda));

  for (std::size_t gen = 0;; ++gen) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
    if (eig.info() != Eigen::Success) break;
    const VectorXd evals = eig.eigenvalues();
    if (!(evals.minCoeff() > 0.0) || evals.maxCoeff() > kMaxCondition * evals.minCoeff()) break;
    B = eig.eigenvectors();
    D = evals.cwiseSqrt();

    if (best.evaluations + static_cast<std::size_t>(lambda) > config.max_evals) break;
    for (int k = 0; k < lambda; ++k) {
      VectorXd z(n);
      for (Eigen::Index i = 0; i < n; ++i) z[i] = gauss(rng);
      y.col(k) = B * D.asDiagonal() * z;
      const VectorXd x = mean + sigma * y.col(k);
      const double fx = objective(x);
      ++best.evaluations;
      if (std::isnan(fx)) throw Error("objective returned NaN");
      f[static_cast<std::size_t>(k)] = fx;
      if (fx < best.f) {
        best.f = fx;
        best.x = x;
      }
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&f](int a, int b) {
      return f[static_cast<std::size_t>(a)] < f[static_cast<std::size_t>(b)];
    });

    VectorXd yw = VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) yw += weights[i] * y.col(order[static_cast<std::size_t>(i)]);
    mean += sigma * yw;

    const MatrixXd c_inv_sqrt = B * D.cwiseInverse().asDiagonal() * B.transpose();
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (c_inv_sqrt * yw);
    const double ps_norm = ps.norm();
    const double decay = 1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(gen + 1));
    const bool hsig = ps_norm / std::sqrt(decay) / chi_n < 1.4 + 2.0 / (nd + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const auto yi = y.col(order[static_cast<std::size_t>(i)]);
      rank_mu.noalias() += weights[i] * yi * yi.transpose();
    }
    const double keep = 1.0 - c1 - cmu + (hsig ? 0.0 : c1 * cc * (2.0 - cc));
    C = keep * C + c1 * pc * pc.transpose() + cmu * rank_mu;
    C = 0.5 * (C + C.transpose());
    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    const double gen_best = f[static_cast<std::size_t>(order.front())];
    history.push_back(gen_best);
    if (history.size() > history_len) history.pop_front();

    if (observer) {
      CmaesGeneration g;
      g.generation = gen + 1;
      g.evaluations = best.evaluations;
      g.mean = mean;
      g.sigma = sigma;
      g.best_f = best.f;
      g.min_eigenvalue = Eigen::SelfAdjointEigenSolver<MatrixXd>(C, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      observer(g);
    }

    double gen_worst = gen_best;
    for (double v : f)
      if (std::isfinite(v)) gen_worst = std::max(gen_worst, v);
    if (std::isfinite(gen_best) && history.size() == history_len) {
      const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
      if (*hi - *lo <= config.f_tol && gen_worst - gen_best <= config.f_tol) {
        best.converged = true;
        break;
      }
    }
    if (sigma * std::sqrt(C.diagonal().maxCoeff()) < config.x_tol) {
      best.converged = true;
      break;
    }
    if (!std::isfinite(sigma) || sigma == 0.0) break;
  }
  return best;
}

}  // namespace

CmaesResult cmaes_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                           const CmaesConfig& config, const GenerationObserver& observer) {
  config.validate(static_cast<std::size_t>(x0.size()));
  if (!x0.allFinite()) throw ConfigError("starting point must be finite");
  CmaesResult best;
  std::size_t evaluations = 0;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    CmaesResult res = run_once(objective, x0, config, derive_seed(config.seed, r), observer);
    evaluations += res.evaluations;
    if (r == 0 || res.f < best.f) best = std::move(res);
  }
  best.evaluations = evaluations;
  best.restarts_used = config.restarts;
  return best;
}

}  // namespace darkworlds
