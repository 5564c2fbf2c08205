#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "darkworlds/mcmc/output.hpp"
#include "darkworlds/mcmc/summary.hpp"
#include "support.hpp"

using namespace darkworlds;
using namespace darkworlds::mcmc;
using testing::Gen;

namespace {

Draws from_columns(const std::vector<std::vector<double>>& chains, std::string name = "x") {
  Draws d;
  d.names = {std::move(name)};
  for (const auto& c : chains) {
    ChainDraws cd;
    cd.samples = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    for (std::size_t t = 0; t < c.size(); ++t) cd.iterations.push_back(t + 1);
    d.chains.push_back(std::move(cd));
  }
  return d;
}

// R-hat written out from the definition, for cross-checking.
double rhat_oracle(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> halves;
  std::size_t n = SIZE_MAX;
  for (const auto& c : chains) n = std::min(n, c.size() / 2);
  for (const auto& c : chains) {
    halves.emplace_back(c.begin(), c.begin() + static_cast<long>(n));
    halves.emplace_back(c.end() - static_cast<long>(n), c.end());
  }
  const double m = static_cast<double>(halves.size());
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    double s = 0;
    for (double x : h) s += x;
    const double mu = s / n;
    double v = 0;
    for (double x : h) v += (x - mu) * (x - mu);
    means.push_back(mu);
    vars.push_back(v / (n - 1));
  }
  double grand = 0, W = 0;
  for (std::size_t k = 0; k < halves.size(); ++k) {
    grand += means[k] / m;
    W += vars[k] / m;
  }
  double B = 0;
  for (double mu : means) B += (mu - grand) * (mu - grand);
  B *= double(n) / (m - 1);
  return std::sqrt(((n - 1.0) / n * W + B / n) / W);
}

}  // namespace

TEST_CASE("summary of iid standard normal chains") {
  Gen gen(51);
  const std::size_t N = 5000;
  std::vector<std::vector<double>> chains(4);
  for (auto& c : chains)
    for (std::size_t t = 0; t < N; ++t) c.push_back(gen.normal(0, 1));
  const PosteriorSummary s = summarize(from_columns(chains));
  REQUIRE(s.nodes.size() == 1);
  const NodeSummary& n = s.nodes[0];
  REQUIRE(n.rhat);
  CHECK(*n.rhat < 1.01);
  CHECK(*n.rhat == doctest::Approx(rhat_oracle(chains)).epsilon(1e-12));
  CHECK(std::abs(n.mean) < 4.0 / std::sqrt(4.0 * N));
  CHECK(n.sd == doctest::Approx(1.0).epsilon(0.03));
  CHECK(n.ess <= 4.0 * N);
  CHECK(n.ess > 0.7 * 4.0 * N);
  CHECK(n.q025 <= n.q50);
  CHECK(n.q50 <= n.q975);
  CHECK(n.q025 == doctest::Approx(-1.96).epsilon(0.05));
  CHECK(s.chains == 4);
  CHECK(s.draws == 4 * N);
}

TEST_CASE("summary detects disagreeing chains") {
  const std::vector<std::vector<double>> chains{std::vector<double>(100, 0.0), std::vector<double>(100, 1.0)};
  const PosteriorSummary s = summarize(from_columns(chains));
  REQUIRE(s.nodes[0].rhat);
  CHECK(*s.nodes[0].rhat > 1.1);

  Gen gen(52);
  std::vector<std::vector<double>> shifted(2);
  for (int t = 0; t < 500; ++t) {
    shifted[0].push_back(gen.normal(0, 1));
    shifted[1].push_back(gen.normal(3, 1));
  }
  const auto r = summarize(from_columns(shifted)).nodes[0].rhat;
  REQUIRE(r);
  CHECK(*r > 1.1);
  CHECK(*r == doctest::Approx(rhat_oracle(shifted)).epsilon(1e-12));
}

TEST_CASE("summary of a constant chain") {
  const PosteriorSummary s = summarize(from_columns({std::vector<double>(50, 2.5)}));
  CHECK(s.nodes[0].sd == 0.0);
  CHECK_FALSE(s.nodes[0].rhat.has_value());
  CHECK(s.nodes[0].mean == 2.5);
  CHECK(s.nodes[0].ess == 50.0);
  // too short for split R-hat
  CHECK_FALSE(summarize(from_columns({{1.0, 2.0, 3.0}})).nodes[0].rhat.has_value());
}

TEST_CASE("summary rejects an empty draw set") {
  CHECK_THROWS_AS(summarize(Draws{}), Error);
  Draws empty = from_columns({{}});
  CHECK_THROWS_AS(summarize(empty), Error);
}

TEST_CASE("summary quantiles follow linear interpolation between order statistics") {
  const PosteriorSummary s = summarize(from_columns({{4, 1, 3, 2}, {5, 9, 7, 6, 8}}));
  // sorted 1..9: h = 8p
  CHECK(s.nodes[0].q50 == doctest::Approx(5.0));
  CHECK(s.nodes[0].q025 == doctest::Approx(1.2));
  CHECK(s.nodes[0].q975 == doctest::Approx(8.8));
}

TEST_CASE("summary ESS of an autocorrelated chain") {
  Gen gen(53);
  const double rho = 0.9;
  const std::size_t N = 40000;
  std::vector<double> c;
  double x = 0;
  for (std::size_t t = 0; t < N; ++t) {
    x = rho * x + std::sqrt(1 - rho * rho) * gen.normal(0, 1);
    c.push_back(x);
  }
  const double expected = N * (1 - rho) / (1 + rho);
  const double ess = summarize(from_columns({c})).nodes[0].ess;
  CHECK(ess == doctest::Approx(expected).epsilon(0.3));
}

TEST_CASE("summary property: invariants on random draw sets") {
  Gen gen(54);
  for (int k = 0; k < 200; ++k) {
    std::vector<std::vector<double>> chains(static_cast<std::size_t>(gen.integer(1, 4)));
    const int n = gen.integer(1, 60);
    for (auto& c : chains)
      for (int t = 0; t < n; ++t) c.push_back(gen.integer(0, 3) == 0 ? 1.0 : gen.normal(0, 2));
    const auto s = summarize(from_columns(chains)).nodes[0];
    CHECK(s.sd >= 0.0);
    CHECK(s.q025 <= s.q50);
    CHECK(s.q50 <= s.q975);
    CHECK(s.ess <= double(chains.size() * n));
    CHECK(s.ess > 0.0);
  }
}

TEST_CASE("label groups and sorting") {
  const std::vector<std::string> names{"mass[1]", "loc[1,1]", "loc[1,2]", "mass[2]", "loc[2,1]", "loc[2,2]"};
  const LabelGroups groups = halo_label_groups(names);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::vector<std::size_t>{1, 2, 0});
  CHECK(groups[1] == std::vector<std::size_t>{4, 5, 3});
  CHECK(halo_label_groups({"mass[1]", "loc[1,1]", "loc[1,2]"}).empty());

  Draws d;
  d.names = names;
  ChainDraws c;
  c.samples.resize(2, 6);
  c.samples << 10, 900, 800, 20, 100, 200,  //
      30, 50, 60, 40, 70, 80;
  c.iterations = {1, 2};
  d.chains.push_back(c);
  const Draws sorted = sort_labels(d, groups);
  Eigen::MatrixXd expected(2, 6);
  expected << 20, 100, 200, 10, 900, 800,  //
      30, 50, 60, 40, 70, 80;
  CHECK((sorted.chains[0].samples.array() == expected.array()).all());
  CHECK((d.chains[0].samples.row(0).array() == Eigen::RowVectorXd{{10, 900, 800, 20, 100, 200}}.array()).all());
}

TEST_CASE("draws CSV layout") {
  Draws d;
  d.names = {"mass[1]", "loc[1,1]"};
  ChainDraws c1, c2;
  c1.samples.resize(1, 2);
  c1.samples << 1.5, 0.1;
  c1.iterations = {11};
  c2.samples.resize(1, 2);
  c2.samples << 2.0, 3.0;
  c2.iterations = {11};
  d.chains = {c1, c2};
  std::ostringstream out;
  write_draws_csv(d, out);
  CHECK(out.str() ==
        "chain,iteration,mass[1],\"loc[1,1]\"\n"
        "1,11,1.5,0.10000000000000001\n"
        "2,11,2,3\n");
}

TEST_CASE("summary JSON layout") {
  PosteriorSummary s;
  s.chains = 2;
  s.draws = 10;
  NodeSummary a{"x", 1.0, 0.5, 0.1, 1.0, 1.9, 9.5, 1.001};
  NodeSummary b{"y", 0.0, 0.0, 0.0, 0.0, 0.0, 10.0, std::nullopt};
  NodeSummary c{"z", 0.0, 0.0, 0.0, 0.0, 0.0, 10.0, std::numeric_limits<double>::infinity()};
  s.nodes = {a, b, c};
  const auto doc = nlohmann::json::parse(summary_json(s, 42));
  CHECK(doc["seed"] == 42);
  CHECK(doc["chains"] == 2);
  CHECK(doc["draws"] == 10);
  REQUIRE(doc["nodes"].size() == 3);
  const auto& n = doc["nodes"][0];
  for (const char* key : {"name", "mean", "sd", "q2.5", "q50", "q97.5", "ess", "rhat", "rhat_status"})
    CHECK_MESSAGE(n.contains(key), key);
  CHECK(n["rhat"] == 1.001);
  CHECK(n["rhat_status"] == "ok");
  CHECK(doc["nodes"][1]["rhat"].is_null());
  CHECK(doc["nodes"][1]["rhat_status"] == "not_available");
  CHECK(doc["nodes"][2]["rhat"].is_null());
  CHECK(doc["nodes"][2]["rhat_status"] == "divergent");
}
