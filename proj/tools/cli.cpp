#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "darkworlds/bugs/graph.hpp"
#include "darkworlds/bugs/parser.hpp"
#include "darkworlds/halo_fit.hpp"
#include "darkworlds/mcmc/output.hpp"
#include "darkworlds/mcmc/sampler.hpp"
#include "darkworlds/mcmc/summary.hpp"
#include "darkworlds/simulate.hpp"
#include "darkworlds/sky_io.hpp"
#include "darkworlds/svg.hpp"

namespace darkworlds::cli {

namespace {

/// Bad flag combinations or values; exit code 1.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text, const std::string& what) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw UsageError("invalid number '" + text + "' in " + what);
  return v;
}

std::pair<std::string, double> parse_binding(const std::string& text, const std::string& flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError(flag + " expects NAME=VALUE, got '" + text + "'");
  return {text.substr(0, eq), parse_number(text.substr(eq + 1), flag + " " + text)};
}

Halod parse_halo(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(parse_number(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start),
                                 "--halo " + text));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw UsageError("--halo expects x,y,mass, got '" + text + "'");
  Halod h;
  h.loc = {parts[0], parts[1]};
  h.mass = parts[2];
  if (h.mass < 0) throw UsageError("--halo mass must be >= 0");
  return h;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, 0, "cannot open file for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t effective_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

bugs::ModelAst load_model(const std::string& path) {
  const std::string source = read_text(path);
  try {
    return bugs::parse_source(source);
  } catch (const SourceError& e) {
    throw Error(path + ":" + e.what());
  }
}

void apply_constants(const std::vector<std::string>& flags, bugs::Constants& constants) {
  for (const auto& c : flags) {
    const auto [name, value] = parse_binding(c, "--const");
    constants[name] = value;
  }
}

// --- check ------------------------------------------------------------------

struct CheckArgs {
  std::string model;
  std::vector<std::string> consts;
  std::string data;
};

int run_check(const CheckArgs& a, std::ostream& out) {
  const bugs::ModelAst ast = load_model(a.model);
  bugs::Constants constants;
  bugs::DataTable data;
  bool placeholder = false;
  if (!a.data.empty()) bind_sky(read_sky(a.data), data, constants);
  apply_constants(a.consts, constants);

  if (a.data.empty()) {
    // Without a sky, bind zero-valued stand-ins for the sky columns the
    // model uses so that its structure can still be compiled.
    const auto free = bugs::free_variables(ast);
    const auto stochastic = bugs::stochastic_variables(ast);
    const auto g = constants.find("G");
    for (const char* name : {"gx", "gy", "e1", "e2"}) {
      if (!free.count(name) && !stochastic.count(name)) continue;
      if (g == constants.end()) throw UsageError("model uses sky data; pass --data or --const G=<galaxies>");
      if (!(g->second >= 1) || std::nearbyint(g->second) != g->second)
        throw UsageError("--const G must be a positive integer");
      data[name] = bugs::DataArray::vector(std::vector<double>(static_cast<std::size_t>(g->second), 0.0));
      placeholder = true;
    }
  }

  const bugs::CompiledGraph graph = bugs::compile(ast, constants, data);
  out << "model: " << a.model << "\n";
  if (placeholder) out << "data: placeholder sky columns (gx, gy, e1, e2 as used)\n";
  out << "nodes: " << graph.size() << "\n"
      << "deterministic: " << graph.count(bugs::NodeKind::Deterministic) << "\n"
      << "stochastic: " << graph.count(bugs::NodeKind::Stochastic) << "\n"
      << "observed: " << graph.observed_count() << "\n"
      << "unobserved: " << graph.latent().size() << "\n";
  return kExitOk;
}

// --- simulate -----------------------------------------------------------------

struct SimulateArgs {
  std::vector<std::string> halos;
  std::optional<int> galaxies;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string truth_out;
  int sky_id = 1;
  std::optional<int> batch;
  std::string out_dir;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::uint64_t seed = effective_seed(a.seed);
  if (a.batch) {
    if (a.out_dir.empty()) throw UsageError("--batch requires --out-dir");
    if (!a.halos.empty() || !a.out.empty()) throw UsageError("--batch cannot be combined with --halo or --out");
    out << "seed: " << seed << "\n";
    std::filesystem::create_directories(a.out_dir);
    const auto skies = simulate_batch(*a.batch, seed);
    std::vector<TruthRow> truth;
    for (const auto& s : skies) {
      write_sky(s.sky, (std::filesystem::path(a.out_dir) / ("sky_" + std::to_string(s.sky.id) + ".csv")).string());
      TruthRow row{s.sky.id, {}};
      for (const auto& h : s.halos) row.halos.push_back(h.loc);
      truth.push_back(std::move(row));
    }
    write_truth(truth, (std::filesystem::path(a.out_dir) / "halos.csv").string());
    out << "wrote " << skies.size() << " skies to " << a.out_dir << "\n";
    return kExitOk;
  }
  if (a.out.empty()) throw UsageError("--out is required (or use --batch with --out-dir)");
  if (a.halos.empty() || a.halos.size() > 3) throw UsageError("give --halo x,y,mass one to three times");
  SimConfig cfg;
  for (const auto& h : a.halos) cfg.halos.push_back(parse_halo(h));
  cfg.n_galaxies = a.galaxies;
  cfg.seed = seed;
  cfg.sky_id = a.sky_id;
  out << "seed: " << seed << "\n";
  const Sky sky = simulate_sky(cfg);
  write_sky(sky, a.out);
  if (!a.truth_out.empty()) {
    TruthRow row{a.sky_id, {}};
    for (const auto& h : cfg.halos) row.halos.push_back(h.loc);
    write_truth({row}, a.truth_out);
  }
  out << "wrote " << sky.galaxies.size() << " galaxies to " << a.out << "\n";
  return kExitOk;
}

// --- infer --------------------------------------------------------------------

struct InferArgs {
  std::string model;
  std::string data;
  std::vector<std::string> consts;
  std::vector<std::string> inits;
  int halos = 1;
  std::size_t iters = 20000;
  std::optional<std::size_t> burnin;
  std::size_t thin = 1;
  std::size_t chains = 4;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string summary;
};

int run_infer(const InferArgs& a, std::ostream& out) {
  const std::uint64_t seed = effective_seed(a.seed);
  out << "seed: " << seed << "\n";
  const bugs::ModelAst ast = load_model(a.model);
  bugs::Constants constants;
  bugs::DataTable data;
  if (!a.data.empty()) bind_sky(read_sky(a.data), data, constants);
  constants["H"] = a.halos;
  apply_constants(a.consts, constants);
  const bugs::CompiledGraph graph = bugs::compile(ast, constants, data);

  mcmc::SamplerConfig cfg;
  cfg.iterations = a.iters;
  cfg.burn_in = a.burnin.value_or(a.iters / 2);
  cfg.thin = a.thin;
  cfg.n_chains = a.chains;
  cfg.seed = seed;
  for (const auto& i : a.inits) cfg.initial.insert(parse_binding(i, "--init"));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  const mcmc::Draws draws = mcmc::run_chains(graph, cfg);
  if (!a.out.empty()) mcmc::write_draws_csv(draws, a.out);
  const auto summary = mcmc::summarize(mcmc::sort_labels(draws, mcmc::halo_label_groups(draws.names)));
  if (!a.summary.empty()) {
    std::ofstream js(a.summary, std::ios::binary | std::ios::trunc);
    if (!js) throw FormatError(a.summary, 0, "cannot open file for writing");
    js << mcmc::summary_json(summary, seed);
  }
  out << std::left << std::setw(12) << "node" << std::right << std::setw(14) << "mean" << std::setw(12)
      << "sd" << std::setw(10) << "ess" << std::setw(9) << "rhat" << "\n";
  for (const auto& s : summary.nodes) {
    std::ostringstream rhat;
    if (s.rhat) rhat << std::fixed << std::setprecision(3) << *s.rhat;
    else rhat << "n/a";
    out << std::left << std::setw(12) << s.name << std::right << std::fixed << std::setprecision(4)
        << std::setw(14) << s.mean << std::setw(12) << s.sd << std::setprecision(0) << std::setw(10)
        << s.ess << std::setw(9) << rhat.str() << "\n";
  }
  return kExitOk;
}

// --- fit ----------------------------------------------------------------------

struct FitArgs {
  std::string data;
  int halos = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> max_evals;
};

int run_fit(const FitArgs& a, std::ostream& out) {
  const std::uint64_t seed = effective_seed(a.seed);
  out << "seed: " << seed << "\n";
  if (a.halos < 1 || a.halos > 3) throw UsageError("--halos must be 1, 2 or 3");
  const Sky sky = read_sky(a.data);
  CmaesConfig cfg = default_fit_config(a.halos);
  cfg.seed = seed;
  if (a.restarts) cfg.restarts = *a.restarts;
  if (a.max_evals) cfg.max_evals = *a.max_evals;
  const FitResult fit = fit_halos(sky, a.halos, LensParams{}, cfg);
  const std::string json = fit_json(fit);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError(a.out, 0, "cannot open file for writing");
    f << json;
  }
  for (const auto& h : fit.halos)
    out << "halo x=" << format_real(h.loc.x()) << " y=" << format_real(h.loc.y())
        << " mass=" << format_real(h.mass) << "\n";
  out << "neg_log_posterior=" << format_real(fit.neg_log_posterior) << " evaluations=" << fit.evaluations
      << " converged=" << (fit.converged ? "true" : "false") << "\n";
  return kExitOk;
}

// --- plot ---------------------------------------------------------------------

struct PlotArgs {
  std::string data;
  std::string truth;
  std::optional<int> sky_id;
  std::vector<std::string> halos;
  std::string fit;
  std::string out;
};

int run_plot(const PlotArgs& a, std::ostream& out) {
  const Sky sky = read_sky(a.data);
  std::vector<Point2d> truth;
  for (const auto& h : a.halos) truth.push_back(parse_halo(h).loc);
  if (!a.truth.empty()) {
    const auto rows = read_truth(a.truth);
    const TruthRow* match = nullptr;
    if (a.sky_id) {
      for (const auto& r : rows)
        if (r.sky_id == *a.sky_id) match = &r;
      if (!match) throw Error(a.truth + ": no row for sky " + std::to_string(*a.sky_id));
    } else if (rows.size() == 1) {
      match = &rows.front();
    } else {
      throw UsageError("--truth holds several skies; pick one with --sky-id");
    }
    truth.insert(truth.end(), match->halos.begin(), match->halos.end());
  }
  std::vector<Point2d> fitted;
  if (!a.fit.empty())
    for (const auto& h : parse_fit_json(read_text(a.fit)).halos) fitted.push_back(h.loc);
  render_sky_svg(sky, truth, fitted, a.out);
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dark matter halo inference: model checking, simulation, MCMC and CMA-ES fitting"};
  app.name("darkworlds");
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Compile a model and print node counts");
  c->add_option("model", check.model, "Model source (.bug)")->required();
  c->add_option("--const", check.consts, "Model constant NAME=VALUE (repeatable)");
  c->add_option("--data", check.data, "Sky CSV bound as gx, gy, e1, e2 and G");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic sky");
  s->add_option("--halo", sim.halos, "Halo x,y,mass (repeat up to 3 times)");
  s->add_option("--galaxies", sim.galaxies, "Number of galaxies (default: uniform in [300, 740])");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--out", sim.out, "Sky CSV to write");
  s->add_option("--truth-out", sim.truth_out, "Halo truth CSV to write");
  s->add_option("--sky-id", sim.sky_id, "Sky id used in the truth file");
  s->add_option("--batch", sim.batch, "Generate this many competition-style skies")->check(CLI::PositiveNumber);
  s->add_option("--out-dir", sim.out_dir, "Directory for --batch output");

  InferArgs inf;
  auto* i = app.add_subcommand("infer", "Sample the posterior of a model with Metropolis-within-Gibbs");
  i->add_option("--model", inf.model, "Model source (.bug)")->required();
  i->add_option("--data", inf.data, "Sky CSV bound as gx, gy, e1, e2 and G");
  i->add_option("--const", inf.consts, "Model constant NAME=VALUE (repeatable)");
  i->add_option("--halos", inf.halos, "Number of halos, bound as H")->check(CLI::Range(1, 3));
  i->add_option("--init", inf.inits, "Initial value NAME=VALUE for an unobserved node (repeatable)");
  i->add_option("--iters", inf.iters, "Sweeps per chain, burn-in included");
  i->add_option("--burnin", inf.burnin, "Burn-in sweeps (default: half of --iters)");
  i->add_option("--thin", inf.thin, "Keep every n-th post burn-in sweep");
  i->add_option("--chains", inf.chains, "Number of chains");
  i->add_option("--seed", inf.seed, "Random seed");
  i->add_option("--out", inf.out, "Draws CSV to write");
  i->add_option("--summary", inf.summary, "Posterior summary JSON to write");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit halo locations and masses with CMA-ES");
  f->add_option("--data", fit.data, "Sky CSV")->required();
  f->add_option("--halos", fit.halos, "Number of halos (1-3)")->required();
  f->add_option("--seed", fit.seed, "Random seed");
  f->add_option("--out", fit.out, "Fit JSON to write");
  f->add_option("--restarts", fit.restarts, "Independent restarts");
  f->add_option("--max-evals", fit.max_evals, "Evaluation budget per restart");

  PlotArgs plot;
  auto* p = app.add_subcommand("plot", "Render a sky with true and fitted halos as SVG");
  p->add_option("--data", plot.data, "Sky CSV")->required();
  p->add_option("--truth", plot.truth, "Halo truth CSV (red crosses)");
  p->add_option("--sky-id", plot.sky_id, "Row of the truth file to draw");
  p->add_option("--halo", plot.halos, "True halo x,y,mass (repeatable)");
  p->add_option("--fit", plot.fit, "Fit JSON (green circles)");
  p->add_option("--out", plot.out, "SVG to write")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c->parsed()) return run_check(check, out);
    if (s->parsed()) return run_simulate(sim, out);
    if (i->parsed()) return run_infer(inf, out);
    if (f->parsed()) return run_fit(fit, out);
    if (p->parsed()) return run_plot(plot, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace darkworlds::cli
