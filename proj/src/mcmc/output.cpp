#include "darkworlds/mcmc/output.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "darkworlds/sky_io.hpp"

namespace darkworlds::mcmc {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_draws_csv(const Draws& draws, std::ostream& out) {
  out << "chain,iteration";
  for (const auto& n : draws.names) out << ',' << csv_field(n);
  out << '\n';
  for (std::size_t c = 0; c < draws.chains.size(); ++c) {
    const auto& chain = draws.chains[c];
    for (Eigen::Index r = 0; r < chain.samples.rows(); ++r) {
      out << (c + 1) << ',' << chain.iterations[static_cast<std::size_t>(r)];
      for (Eigen::Index j = 0; j < chain.samples.cols(); ++j) out << ',' << format_real(chain.samples(r, j));
      out << '\n';
    }
  }
}

void write_draws_csv(const Draws& draws, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path, 0, "cannot open file for writing");
  write_draws_csv(draws, out);
  if (!out) throw FormatError(path, 0, "write failed");
}

std::string summary_json(const PosteriorSummary& summary, std::uint64_t seed) {
  nlohmann::ordered_json doc;
  doc["chains"] = summary.chains;
  doc["draws"] = summary.draws;
  doc["seed"] = seed;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& s : summary.nodes) {
    nlohmann::ordered_json n;
    n["name"] = s.name;
    n["mean"] = s.mean;
    n["sd"] = s.sd;
    n["q2.5"] = s.q025;
    n["q50"] = s.q50;
    n["q97.5"] = s.q975;
    n["ess"] = s.ess;
    if (s.rhat && std::isfinite(*s.rhat)) {
      n["rhat"] = *s.rhat;
      n["rhat_status"] = "ok";
    } else {
      n["rhat"] = nullptr;
      n["rhat_status"] = s.rhat ? "divergent" : "not_available";
    }
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

}  // namespace darkworlds::mcmc
