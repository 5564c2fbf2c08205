#ifndef DARKWORLDS_MCMC_OUTPUT_HPP
#define DARKWORLDS_MCMC_OUTPUT_HPP

#include <cstdint>
#include <ostream>
#include <string>

#include "darkworlds/mcmc/summary.hpp"

namespace darkworlds::mcmc {

/// CSV, one row per retained draw: chain,iteration,<node>... Chains are
/// 1-based; node names containing commas are double-quoted.
void write_draws_csv(const Draws& draws, std::ostream& out);
void write_draws_csv(const Draws& draws, const std::string& path);

/// {"chains":..,"draws":..,"seed":..,"nodes":[{"name","mean","sd","q2.5",
///  "q50","q97.5","ess","rhat","rhat_status"}]}; rhat is null unless finite.
std::string summary_json(const PosteriorSummary& summary, std::uint64_t seed);

}  // namespace darkworlds::mcmc

#endif  // DARKWORLDS_MCMC_OUTPUT_HPP
