// bbayes command line: simulation, posterior sampling, estimators and the
// experiment harness. Exit codes: 0 pass, 1 error, 2 tolerance failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bbayes/complexity.hpp"
#include "bbayes/config.hpp"
#include "bbayes/errors.hpp"
#include "bbayes/estimators.hpp"
#include "bbayes/grid_function.hpp"
#include "bbayes/harness.hpp"
#include "bbayes/model.hpp"
#include "bbayes/posterior.hpp"
#include "bbayes/priors.hpp"
#include "bbayes/report.hpp"
#include "bbayes/small_ball.hpp"

namespace fs = std::filesystem;
using namespace bbayes;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& c, bool with_threads) {
  cmd->add_option("--config", c.config, "key = value configuration file");
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  if (with_threads) cmd->add_option("--threads", c.threads, "worker threads (overrides the config)");
}

KeyValueConfig load_config(const Common& c) {
  KeyValueConfig cfg = c.config.empty() ? KeyValueConfig() : KeyValueConfig::load(c.config);
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  if (c.threads) cfg.set("threads", std::to_string(*c.threads));
  return cfg;
}

void report_written(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& n : notes) std::cout << "note: " << n << '\n';
}

int cmd_simulate(const Common& c, const std::string& f0_path) {
  KeyValueConfig cfg = load_config(c);
  cfg.require_known({"seed", "n", "ceiling", "f0.beta", "f0.R", "f0.kind", "f0.grid_level"});
  const GridFunction f0 = f0_path.empty() ? parse_test_function(cfg.subtree("f0.")).build() : load_grid_function(f0_path);
  const double n = cfg.get_double("n", 100.0);
  const double ceiling = cfg.get_double("ceiling", f0.max() + 1.0);
  Rng rng = make_rng(cfg.get_u64("seed", 1), 0);
  const PointPattern pattern = simulate_ppp(f0, n, ceiling, rng);
  const fs::path out(c.out);
  write_file(out / "pattern.csv", [&](std::ostream& os) { write_csv(os, pattern); });
  write_file(out / "f0.csv", [&](std::ostream& os) { write_csv(os, f0); });
  std::cout << "points=" << pattern.size() << '\n';
  report_written({out / "pattern.csv", out / "f0.csv"});
  return kExitPass;
}

int cmd_posterior(const Common& c, const std::string& prior_path, const std::string& pattern_path,
                  const std::string& f0_path) {
  KeyValueConfig cfg = load_config(c);
  cfg.require_known({"seed", "sampler", "draws", "steps", "step_scale", "kernel", "burn_in", "thin",
                     "evidence_draws"});
  const PriorSpec prior = parse_prior(KeyValueConfig::load(prior_path));
  const PointPattern pattern = load_point_pattern(pattern_path);
  std::optional<GridFunction> f0;
  if (!f0_path.empty()) f0 = load_grid_function(f0_path);
  Rng rng = make_rng(cfg.get_u64("seed", 1), 0);
  const SamplerKind sampler = parse_sampler_kind(cfg.get_string("sampler", "mcmc"));
  const PosteriorEnsemble ens =
      sampler == SamplerKind::importance
          ? importance_posterior(prior, pattern, static_cast<std::size_t>(cfg.get_int("draws", 20000)), rng)
          : mcmc_posterior(prior, pattern, parse_mcmc_options(cfg), rng);
  const fs::path out(c.out);
  write_file(out / "posterior_summary.csv", [&](std::ostream& os) { write_summary_csv(os, ens, f0); });
  write_file(out / "posterior_ensemble.txt", [&](std::ostream& os) { write_ensemble(os, ens); });
  write_file(out / "posterior_mean.csv", [&](std::ostream& os) { write_csv(os, posterior_mean(ens)); });
  const PosteriorMeta& m = ens.meta();
  std::cout << "sampler=" << m.sampler << " samples=" << ens.size() << " ess=" << format_double(m.ess)
            << " acceptance=" << format_double(m.acceptance_rate) << '\n';
  print_notes(m.warnings);
  report_written({out / "posterior_summary.csv", out / "posterior_ensemble.txt", out / "posterior_mean.csv"});
  return kExitPass;
}

int cmd_mle(const Common& c, const std::string& pattern_path, std::optional<double> lip,
            std::optional<std::size_t> bins, std::optional<double> cap, int grid_level) {
  if (lip.has_value() == bins.has_value()) throw std::invalid_argument("mle: give exactly one of --lip and --bins");
  const PointPattern pattern = load_point_pattern(pattern_path);
  const double ceiling = cap.value_or(pattern.ceiling());
  const GridFunction f = lip ? mle_lipschitz(pattern, *lip, ceiling, grid_level)
                             : mle_piecewise_constant(pattern, *bins, ceiling);
  const fs::path path = fs::path(c.out) / "mle.csv";
  write_file(path, [&](std::ostream& os) { write_csv(os, f); });
  report_written({path});
  return kExitPass;
}

int cmd_rate_study(const Common& c) {
  const RateStudyConfig cfg = parse_rate_study(load_config(c));
  const RateStudyReport r = run_rate_study(cfg);
  report_written(emit_report(r, c.out));
  std::cout << "prior=" << r.prior_name << " slope=" << format_double(r.fitted_slope)
            << " theory=" << (r.theory ? format_double(*r.theory) : "none") << " excluded=" << r.excluded
            << (r.pass ? " PASS" : " FAIL") << '\n';
  print_notes(r.notes);
  return exit_code_for(r.pass);
}

int cmd_small_ball(const Common& c) {
  const KeyValueConfig cfg = load_config(c);
  std::vector<std::string> known{"seed", "eps", "particles", "runs", "method", "beta", "tolerance"};
  for (const auto& [key, value] : cfg.entries())
    if (std::find(known.begin(), known.end(), key) == known.end() && key.rfind("prior.", 0) != 0 &&
        key.rfind("h.", 0) != 0)
      throw ConfigError(cfg.origin() + ": unknown key '" + key + "'");
  const PriorSpec prior = parse_prior(cfg.subtree("prior."));
  const TestFunctionSpec h = parse_test_function(cfg.subtree("h."));
  SmallBallStudyOptions o;
  o.particles = static_cast<std::size_t>(cfg.get_int("particles", static_cast<long long>(o.particles)));
  o.runs = static_cast<std::size_t>(cfg.get_int("runs", static_cast<long long>(o.runs)));
  o.method = parse_small_ball_method(cfg.get_string("method", "automatic"));
  o.beta = cfg.get_double("beta", h.beta);
  if (cfg.has("tolerance")) o.tolerance = cfg.get_double("tolerance");
  Rng rng = make_rng(cfg.get_u64("seed", 1), 0);
  const SmallBallReport r = run_small_ball_study(prior, h.build(), cfg.get_doubles("eps"), o, rng);
  report_written(emit_report(r, c.out));
  std::cout << "prior=" << r.prior_name << " exponent=" << format_double(r.fitted_exponent)
            << " theory=" << (r.theory ? format_double(*r.theory) : "none") << (r.pass ? " PASS" : " FAIL") << '\n';
  print_notes(r.notes);
  return exit_code_for(r.pass);
}

int cmd_decay_study(const Common& c) {
  const DecayStudyConfig cfg = parse_decay_study(load_config(c));
  const DecayStudyReport r = run_posterior_decay_study(cfg);
  report_written(emit_report(r, c.out));
  std::cout << "prior=" << r.prior_name << " r=" << format_double(r.r)
            << " monotone=" << (r.monotone ? "yes" : "no") << (r.pass ? " PASS" : " FAIL") << '\n';
  print_notes(r.notes);
  return exit_code_for(r.pass);
}

struct ComplexityArgs {
  std::string dict;
  std::string pool;
  std::string f0;
  std::string quantity = "covering";
  double eps = 0.1;
  double delta = 0.1;
  double n = 100.0;
  std::string method = "automatic";
};

FunctionDictionary load_dictionary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path + ": cannot open");
  return FunctionDictionary(read_grid_function_list(is));
}

int cmd_complexity(const Common& c, const ComplexityArgs& a) {
  const FunctionDictionary dict = load_dictionary(a.dict);
  const FunctionDictionary pool = a.pool.empty() ? with_pairwise_minima(dict) : load_dictionary(a.pool);
  CoverMethod method = CoverMethod::automatic;
  if (a.method == "exact") method = CoverMethod::exact;
  else if (a.method == "greedy") method = CoverMethod::greedy;
  else if (a.method != "automatic") throw std::invalid_argument("unknown method '" + a.method + "'");

  ComplexityResult r;
  std::string quantity;
  if (a.quantity == "covering") {
    quantity = "covering_number";
    r = covering_number(dict, a.eps, method == CoverMethod::exact ||
                                         (method == CoverMethod::automatic && dict.size() <= 20));
  } else if (a.quantity == "bracketing") {
    quantity = "one_sided_bracketing_number";
    r = one_sided_bracketing_number(dict, a.delta, pool, method);
  } else if (a.quantity == "separation") {
    quantity = "separation_quantity";
    if (a.f0.empty()) throw std::invalid_argument("separation needs --f0");
    r = separation_quantity(dict, load_grid_function(a.f0), a.n, pool, method);
  } else {
    throw std::invalid_argument("unknown quantity '" + a.quantity + "'");
  }
  const nlohmann::json j{{"quantity", quantity}, {"value", r.value}, {"method", r.method}, {"exact_flag", r.exact}};
  const fs::path path = fs::path(c.out) / "complexity.json";
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  std::cout << j.dump() << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian support-boundary estimation for Poisson point processes"};
  app.require_subcommand(1);

  Common c;
  std::string f0_path, prior_path, pattern_path;
  std::optional<double> lip, cap;
  std::optional<std::size_t> bins;
  int grid_level = 8;
  ComplexityArgs cx;

  auto* simulate = app.add_subcommand("simulate", "simulate a point pattern below f0");
  add_common(simulate, c, false);
  simulate->add_option("--f0", f0_path, "boundary as GridFunction CSV (overrides f0.* keys)");

  auto* posterior = app.add_subcommand("posterior", "sample the posterior for a pattern");
  add_common(posterior, c, false);
  posterior->add_option("--prior", prior_path, "prior config file")->required();
  posterior->add_option("--pattern", pattern_path, "point pattern CSV")->required();
  posterior->add_option("--f0", f0_path, "true boundary CSV, adds l1_to_f0 to the summary");

  auto* mle = app.add_subcommand("mle", "maximum likelihood boundary");
  add_common(mle, c, false);
  mle->add_option("--pattern", pattern_path, "point pattern CSV")->required();
  mle->add_option("--lip", lip, "Lipschitz constant");
  mle->add_option("--bins", bins, "number of bins (power of two)");
  mle->add_option("--cap", cap, "upper cap (default: the pattern ceiling)");
  mle->add_option("--grid-level", grid_level, "output grid level for --lip")->capture_default_str();

  auto* rate = app.add_subcommand("rate-study", "contraction-rate study");
  add_common(rate, c, true);
  auto* small = app.add_subcommand("small-ball", "small-ball probability study");
  add_common(small, c, false);
  auto* decay = app.add_subcommand("decay-study", "posterior mass decay study");
  add_common(decay, c, true);

  auto* complexity = app.add_subcommand("complexity", "covering, bracketing or separation of a dictionary");
  add_common(complexity, c, false);
  complexity->add_option("--dict", cx.dict, "concatenated GridFunction CSVs")->required();
  complexity->add_option("--pool", cx.pool, "bracket pool (default: dictionary and pairwise minima)");
  complexity->add_option("--f0", cx.f0, "reference function for separation");
  complexity->add_option("--quantity", cx.quantity, "covering | bracketing | separation")->capture_default_str();
  complexity->add_option("--eps", cx.eps, "covering radius")->capture_default_str();
  complexity->add_option("--delta", cx.delta, "bracket size")->capture_default_str();
  complexity->add_option("--n", cx.n, "intensity for separation")->capture_default_str();
  complexity->add_option("--method", cx.method, "automatic | exact | greedy")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (*simulate) return cmd_simulate(c, f0_path);
    if (*posterior) return cmd_posterior(c, prior_path, pattern_path, f0_path);
    if (*mle) return cmd_mle(c, pattern_path, lip, bins, cap, grid_level);
    if (*rate) return cmd_rate_study(c);
    if (*small) return cmd_small_ball(c);
    if (*decay) return cmd_decay_study(c);
    if (*complexity) return cmd_complexity(c, cx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
