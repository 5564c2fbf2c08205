#ifndef DARKWORLDS_MCMC_SUMMARY_HPP
#define DARKWORLDS_MCMC_SUMMARY_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "darkworlds/mcmc/sampler.hpp"

namespace darkworlds::mcmc {

struct NodeSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  double ess = 0.0;
  /// Split R-hat; unset when it is not available (fewer than two draws
  /// per half chain, or zero variance everywhere). +inf when the chains
  /// are individually constant but disagree.
  std::optional<double> rhat;
};

struct PosteriorSummary {
  std::vector<NodeSummary> nodes;
  std::size_t chains = 0;
  std::size_t draws = 0;  ///< total retained, all chains
};

/// Posterior statistics per column. ESS uses overlapping batch means with
/// batch size floor(sqrt(n)) and is capped at the number of draws.
PosteriorSummary summarize(const Draws& draws);

/// Columns that move together when exchangeable components swap labels.
/// Entry k lists the columns of component k; the first is the sort key.
using LabelGroups = std::vector<std::vector<std::size_t>>;

/// Halo groups {loc[h,1], loc[h,2], mass[h]} keyed on the x coordinate;
/// empty when the draws hold fewer than two complete halos.
LabelGroups halo_label_groups(const std::vector<std::string>& names);

/// Copy of the draws with the groups permuted, per draw, into ascending
/// key order.
Draws sort_labels(const Draws& draws, const LabelGroups& groups);

}  // namespace darkworlds::mcmc

#endif  // DARKWORLDS_MCMC_SUMMARY_HPP
