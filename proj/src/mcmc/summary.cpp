#include "darkworlds/mcmc/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace darkworlds::mcmc {

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean_of(const Eigen::Ref<const Eigen::VectorXd>& x) { return x.mean(); }

double var_of(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 2) return 0.0;
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

// Overlapping batch means estimate of the asymptotic variance.
double obm_variance(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto n = static_cast<std::size_t>(x.size());
  const auto b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (b < 1 || n - b < 1) return 0.0;
  const double mu = x.mean();
  double window = x.head(static_cast<Eigen::Index>(b)).sum();
  double acc = 0.0;
  for (std::size_t j = 0;; ++j) {
    const double d = window / static_cast<double>(b) - mu;
    acc += d * d;
    if (j + b >= n) break;
    window += x[static_cast<Eigen::Index>(j + b)] - x[static_cast<Eigen::Index>(j)];
  }
  const double nd = static_cast<double>(n), bd = static_cast<double>(b);
  return nd * bd / ((nd - bd) * (nd - bd + 1.0)) * acc;
}

std::optional<double> split_rhat(const std::vector<Eigen::VectorXd>& chains) {
  std::vector<Eigen::VectorXd> halves;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) n = std::min(n, static_cast<std::size_t>(c.size()) / 2);
  if (n < 2) return std::nullopt;
  const auto ni = static_cast<Eigen::Index>(n);
  for (const auto& c : chains) {
    halves.push_back(c.head(ni));
    halves.push_back(c.tail(ni));
  }
  const double m = static_cast<double>(halves.size());
  const double nd = static_cast<double>(n);
  double grand = 0.0, w = 0.0;
  std::vector<double> means;
  for (const auto& h : halves) {
    means.push_back(mean_of(h));
    grand += means.back();
    w += var_of(h);
  }
  grand /= m;
  w /= m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= nd / (m - 1.0);
  if (w == 0.0) {
    if (b == 0.0) return std::nullopt;
    return std::numeric_limits<double>::infinity();
  }
  const double var_plus = (nd - 1.0) / nd * w + b / nd;
  return std::sqrt(var_plus / w);
}

}  // namespace

PosteriorSummary summarize(const Draws& draws) {
  if (draws.chains.empty() || draws.total() == 0) throw Error("cannot summarize an empty draw set");
  PosteriorSummary out;
  out.chains = draws.chains.size();
  out.draws = draws.total();
  const double total = static_cast<double>(out.draws);

  for (std::size_t j = 0; j < draws.names.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    std::vector<Eigen::VectorXd> per_chain;
    std::vector<double> pooled;
    pooled.reserve(out.draws);
    for (const auto& c : draws.chains) {
      if (c.samples.rows() == 0) continue;
      per_chain.emplace_back(c.samples.col(col));
      pooled.insert(pooled.end(), per_chain.back().begin(), per_chain.back().end());
    }
    NodeSummary s;
    s.name = draws.names[j];
    const Eigen::Map<const Eigen::VectorXd> all(pooled.data(), static_cast<Eigen::Index>(pooled.size()));
    s.mean = all.mean();
    const double var = var_of(all);
    s.sd = std::sqrt(var);
    std::sort(pooled.begin(), pooled.end());
    s.q025 = quantile(pooled, 0.025);
    s.q50 = quantile(pooled, 0.5);
    s.q975 = quantile(pooled, 0.975);

    double asym = 0.0;
    for (const auto& c : per_chain) asym += obm_variance(c);
    asym /= static_cast<double>(per_chain.size());
    s.ess = (var > 0.0 && asym > 0.0) ? std::min(total, total * var / asym) : total;
    s.rhat = split_rhat(per_chain);
    out.nodes.push_back(std::move(s));
  }
  return out;
}

LabelGroups halo_label_groups(const std::vector<std::string>& names) {
  auto column = [&names](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
  };
  LabelGroups groups;
  for (int h = 1;; ++h) {
    const std::string k = std::to_string(h);
    const auto x = column("loc[" + k + ",1]");
    const auto y = column("loc[" + k + ",2]");
    const auto m = column("mass[" + k + "]");
    if (!x || !y || !m) break;
    groups.push_back({*x, *y, *m});
  }
  if (groups.size() < 2) groups.clear();
  return groups;
}

Draws sort_labels(const Draws& draws, const LabelGroups& groups) {
  Draws out = draws;
  if (groups.size() < 2) return out;
  std::vector<std::size_t> order(groups.size());
  for (auto& chain : out.chains) {
    Eigen::MatrixXd& s = chain.samples;
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      const Eigen::RowVectorXd row = s.row(r);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return row[static_cast<Eigen::Index>(groups[a][0])] < row[static_cast<Eigen::Index>(groups[b][0])];
      });
      for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t k = 0; k < groups[g].size(); ++k)
          s(r, static_cast<Eigen::Index>(groups[g][k])) = row[static_cast<Eigen::Index>(groups[order[g]][k])];
    }
  }
  return out;
}

}  // namespace darkworlds::mcmc
