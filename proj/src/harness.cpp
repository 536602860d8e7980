#include "bbayes/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bbayes/errors.hpp"
#include "bbayes/model.hpp"

namespace bbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Stream reserved for the ceiling calibration draws.
constexpr std::uint64_t kCeilingStream = ~std::uint64_t{0};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

void check_known(const KeyValueConfig& cfg, const std::vector<std::string>& known,
                 const std::vector<std::string>& prefixes) {
  for (const auto& [key, value] : cfg.entries()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    bool prefixed = false;
    for (const auto& p : prefixes) prefixed = prefixed || key.rfind(p, 0) == 0;
    if (!prefixed) throw ConfigError(cfg.origin() + ": unknown key '" + key + "'");
  }
}

const std::vector<std::string> kSamplerKeys{"steps", "step_scale", "kernel", "burn_in", "thin",
                                            "evidence_draws", "draws", "sampler"};

void validate_grid(const std::vector<double>& n_grid, std::size_t replicates) {
  if (n_grid.size() < 4) throw std::invalid_argument("n_grid needs at least 4 values");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > 0.0)) throw std::invalid_argument("n_grid values must be positive");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) throw std::invalid_argument("n_grid must be strictly increasing");
  }
  if (replicates < 10) throw std::invalid_argument("replicates must be >= 10");
}

PosteriorEnsemble run_sampler(SamplerKind sampler, const PriorSpec& prior, const PointPattern& pattern,
                              std::size_t draws, const McmcOptions& mcmc, Rng& rng) {
  if (sampler == SamplerKind::importance) return importance_posterior(prior, pattern, draws, rng);
  return mcmc_posterior(prior, pattern, mcmc, rng);
}

}  // namespace

McmcOptions parse_mcmc_options(const KeyValueConfig& cfg) {
  McmcOptions o;
  o.steps = static_cast<std::size_t>(cfg.get_int("steps", static_cast<long long>(o.steps)));
  o.step_scale = cfg.get_double("step_scale", o.step_scale);
  const std::string kernel = cfg.get_string("kernel", "gibbs");
  if (kernel == "gibbs") o.kernel = McmcKernel::gibbs;
  else if (kernel == "random_walk") o.kernel = McmcKernel::random_walk;
  else throw ConfigError(cfg.origin() + ": unknown kernel '" + kernel + "'");
  o.burn_in = cfg.get_double("burn_in", o.burn_in);
  o.thin = static_cast<std::size_t>(cfg.get_int("thin", 0));
  o.evidence_draws = static_cast<std::size_t>(cfg.get_int("evidence_draws", static_cast<long long>(o.evidence_draws)));
  return o;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

std::optional<double> rate_exponent(const PriorSpec& prior, double beta) {
  return std::visit(
      Overloaded{
          [&](const BrownianStart&) -> std::optional<double> {
            return beta <= 0.5 ? -beta / (2.0 - beta) : -1.0 / 3.0;
          },
          [&](const WaveletSeries& w) -> std::optional<double> {
            const double a = w.alpha;
            if (w.dist.kind == CoefficientKind::gaussian)
              return -std::min(beta, a) / (1.0 + a + std::max(a - beta, 0.0));
            if (w.dist.kind == CoefficientKind::laplace) return -std::min(beta, a) / (1.0 + a);
            return std::nullopt;
          },
          [&](const TruncatedWavelet&) -> std::optional<double> { return -beta / (beta + 1.0); },
          [&](const FiniteSupport&) -> std::optional<double> { return std::nullopt; },
      },
      prior.variant);
}

std::optional<double> small_ball_exponent(const PriorSpec& prior, double beta) {
  return std::visit(
      Overloaded{
          [&](const BrownianStart&) -> std::optional<double> { return 2.0; },
          [&](const WaveletSeries& w) -> std::optional<double> {
            const double a = w.alpha;
            if (w.dist.kind == CoefficientKind::gaussian)
              return std::max((1.0 + 2.0 * a - 2.0 * beta) / beta, 1.0 / a);
            if (w.dist.kind == CoefficientKind::laplace) return std::max((1.0 + a - beta) / beta, 1.0 / a);
            return std::nullopt;
          },
          [&](const TruncatedWavelet&) -> std::optional<double> { return 1.0 / beta; },
          [&](const FiniteSupport&) -> std::optional<double> { return std::nullopt; },
      },
      prior.variant);
}

bool outside_rate_hypothesis(const PriorSpec& prior) {
  const auto* w = std::get_if<WaveletSeries>(&prior.variant);
  return w && w->alpha <= 1.0;
}

TestFunctionSpec parse_test_function(const KeyValueConfig& cfg) {
  cfg.require_known({"beta", "R", "kind", "grid_level"});
  TestFunctionSpec t;
  t.beta = cfg.get_double("beta", t.beta);
  t.R = cfg.get_double("R", t.R);
  t.kind = parse_test_function_kind(cfg.get_string("kind", "cusp"));
  t.grid_level = static_cast<int>(cfg.get_int("grid_level", t.grid_level));
  return t;
}

std::string to_string(SamplerKind s) { return s == SamplerKind::importance ? "importance" : "mcmc"; }

std::string to_string(ErrorMetric m) {
  switch (m) {
    case ErrorMetric::l1: return "l1";
    case ErrorMetric::lower_part: return "lower_part";
    case ErrorMetric::upper_part: return "upper_part";
  }
  return "?";
}

SamplerKind parse_sampler_kind(const std::string& s) {
  if (s == "importance") return SamplerKind::importance;
  if (s == "mcmc") return SamplerKind::mcmc;
  throw std::invalid_argument("unknown sampler '" + s + "'");
}

ErrorMetric parse_error_metric(const std::string& s) {
  if (s == "l1") return ErrorMetric::l1;
  if (s == "lower_part") return ErrorMetric::lower_part;
  if (s == "upper_part") return ErrorMetric::upper_part;
  throw std::invalid_argument("unknown error metric '" + s + "'");
}

double error_of(ErrorMetric metric, const GridFunction& f, const GridFunction& f0) {
  switch (metric) {
    case ErrorMetric::l1: return l1_distance(f, f0);
    case ErrorMetric::lower_part: return positive_part_integral(f0, f);
    case ErrorMetric::upper_part: return positive_part_integral(f, f0);
  }
  return 0.0;
}

void RateStudyConfig::validate() const {
  prior.validate();
  validate_grid(n_grid, replicates);
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(ceiling_tail > 0.0 && ceiling_tail < 1.0)) throw std::invalid_argument("ceiling_tail must lie in (0, 1)");
  if (sampler == SamplerKind::importance && importance_draws < 1)
    throw std::invalid_argument("draws must be >= 1");
}

RateStudyConfig parse_rate_study(const KeyValueConfig& cfg) {
  std::vector<std::string> known{"seed", "threads", "n_grid", "replicates", "error_metric", "tolerance",
                                 "ceiling_tail", "ceiling_draws"};
  known.insert(known.end(), kSamplerKeys.begin(), kSamplerKeys.end());
  check_known(cfg, known, {"prior.", "f0."});
  RateStudyConfig c;
  try {
    c.prior = parse_prior(cfg.subtree("prior."));
    c.f0 = parse_test_function(cfg.subtree("f0."));
    if (cfg.has("n_grid")) c.n_grid = cfg.get_doubles("n_grid");
    c.replicates = static_cast<std::size_t>(cfg.get_int("replicates", static_cast<long long>(c.replicates)));
    c.sampler = parse_sampler_kind(cfg.get_string("sampler", "mcmc"));
    c.importance_draws = static_cast<std::size_t>(cfg.get_int("draws", static_cast<long long>(c.importance_draws)));
    c.mcmc = parse_mcmc_options(cfg);
    c.error_metric = parse_error_metric(cfg.get_string("error_metric", "l1"));
    c.tolerance = cfg.get_double("tolerance", c.tolerance);
    c.ceiling_tail = cfg.get_double("ceiling_tail", c.ceiling_tail);
    c.ceiling_draws = static_cast<std::size_t>(cfg.get_int("ceiling_draws", static_cast<long long>(c.ceiling_draws)));
    c.seed = cfg.get_u64("seed", c.seed);
    c.threads = static_cast<unsigned>(cfg.get_int("threads", 1));
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
  return c;
}

double calibrate_ceiling(const PriorSpec& prior, const GridFunction& f0, double tail, std::size_t draws,
                         Rng& rng) {
  if (draws < 1) throw std::invalid_argument("calibrate_ceiling: draws must be >= 1");
  std::vector<double> excess(draws);
  for (auto& e : excess) e = sample_prior(prior, rng).max() - f0.max();
  std::sort(excess.begin(), excess.end());
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 - tail) * static_cast<double>(draws)));
  const double delta = excess[std::min(rank, draws) - (rank > 0 ? 1 : 0)];
  return f0.max() + std::max(delta, 0.0);
}

RateCell run_rate_cell(const RateStudyConfig& cfg, const GridFunction& f0, double ceiling, std::size_t n_index,
                       std::size_t replicate) {
  RateCell cell;
  cell.n_index = n_index;
  cell.replicate = replicate;
  cell.n = cfg.n_grid.at(n_index);
  Rng rng = make_rng(cfg.seed, n_index * cfg.replicates + replicate);
  const PointPattern pattern = simulate_ppp(f0, cell.n, ceiling, rng);
  cell.points = pattern.size();
  try {
    const PosteriorEnsemble ens = run_sampler(cfg.sampler, cfg.prior, pattern, cfg.importance_draws, cfg.mcmc, rng);
    cell.error = posterior_quantile(ens, [&](const GridFunction& f) { return error_of(cfg.error_metric, f, f0); }, 0.5);
  } catch (const DegeneratePosteriorError& e) {
    cell.excluded = true;
    cell.note = e.what();
  }
  return cell;
}

RateStudyReport run_rate_study(const RateStudyConfig& cfg) {
  cfg.validate();
  RateStudyReport report;
  report.prior_name = cfg.prior.name();
  report.tolerance = cfg.tolerance;
  const GridFunction f0 = cfg.f0.build();
  Rng ceiling_rng = make_rng(cfg.seed, kCeilingStream);
  report.ceiling = calibrate_ceiling(cfg.prior, f0, cfg.ceiling_tail, cfg.ceiling_draws, ceiling_rng);

  const std::size_t total = cfg.n_grid.size() * cfg.replicates;
  report.cells.resize(total);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    report.cells[i] = run_rate_cell(cfg, f0, report.ceiling, i / cfg.replicates, i % cfg.replicates);
  });

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) {
    RatePoint p;
    p.n = cfg.n_grid[k];
    std::vector<double> errs;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      const RateCell& c = report.cells[k * cfg.replicates + r];
      if (c.excluded) ++p.excluded;
      else errs.push_back(c.error);
    }
    p.included = errs.size();
    report.excluded += p.excluded;
    if (!errs.empty()) {
      p.median = quantile(errs, 0.5);
      p.q1 = quantile(errs, 0.25);
      p.q3 = quantile(errs, 0.75);
      if (p.median > 0.0) {
        xs.push_back(p.n);
        ys.push_back(p.median);
      }
    }
    report.points.push_back(p);
  }
  report.too_many_exclusions = static_cast<double>(report.excluded) > 0.2 * static_cast<double>(total);
  if (report.too_many_exclusions)
    report.notes.push_back("excluded " + std::to_string(report.excluded) + " of " + std::to_string(total) +
                           " cells (limit 20%)");

  report.theory = rate_exponent(cfg.prior, cfg.f0.beta);
  report.outside_hypothesis = outside_rate_hypothesis(cfg.prior);
  if (report.outside_hypothesis) report.notes.push_back("alpha <= 1: outside the series-prior rate theorem");
  if (xs.size() >= 2) {
    const LineFit fit = fit_loglog(xs, ys);
    report.fitted_slope = fit.slope;
    report.intercept = fit.intercept;
  } else {
    report.notes.push_back("fewer than two usable n values; no slope fitted");
    report.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  }
  if (std::holds_alternative<TruncatedWavelet>(cfg.prior.variant) && xs.size() >= 2) {
    std::vector<double> loglog;
    for (double n : xs) loglog.push_back(std::log(n));
    const double shift = fit_loglog(xs, loglog).slope * cfg.f0.beta / (cfg.f0.beta + 1.0);
    report.notes.push_back("log factor of the adaptive rate adds " + format_double(shift) +
                           " to the slope over this n grid; not fitted");
  }
  if (!report.theory) report.notes.push_back("no theoretical exponent for this prior");
  report.margin = report.theory ? std::abs(report.fitted_slope - *report.theory) : kInf;
  report.pass = report.theory && std::isfinite(report.fitted_slope) && report.margin <= cfg.tolerance &&
                !report.too_many_exclusions;
  return report;
}

double small_ball_lower_bound_log(const CoefficientDistribution& dist, double alpha, double beta, double D,
                                  double eps) {
  const double where = D * std::pow(eps, -std::max(alpha - beta, 0.0) / beta);
  const double power = D * std::pow(eps, -1.0 / std::min(alpha, beta));
  const double ld = log_density_at(dist, where);
  return ld == -kInf ? -kInf : power * ld;
}

std::optional<double> calibrate_lemma_constant(const CoefficientDistribution& dist, double alpha, double beta,
                                               double eps, double log_p) {
  auto g = [&](double D) { return small_ball_lower_bound_log(dist, alpha, beta, D, eps); };
  // Walk up to the first D whose bound drops below the estimate, then bisect.
  double lo = 0.0;
  double hi = 1e-3;
  while (g(hi) > log_p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::nullopt;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > log_p ? lo : hi) = mid;
  }
  return hi;
}

SmallBallReport run_small_ball_study(const PriorSpec& prior, const GridFunction& h,
                                     const std::vector<double>& eps_grid, const SmallBallStudyOptions& options,
                                     Rng& rng) {
  if (eps_grid.empty()) throw std::invalid_argument("run_small_ball_study: empty eps grid");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0)) throw std::invalid_argument("run_small_ball_study: eps must be positive");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument("run_small_ball_study: eps grid must be decreasing");
  }
  SmallBallReport report;
  report.prior_name = prior.name();
  report.tolerance = options.tolerance;
  std::vector<double> xs, ys;
  for (double eps : eps_grid) {
    const SmallBallEstimate e = small_ball_probability(prior, h, eps, options.particles, options.runs, rng,
                                                       options.method);
    SmallBallRow row;
    row.eps = eps;
    row.probability = e.probability;
    row.se = e.se;
    row.excluded = !(e.probability > 0.0);
    if (row.excluded) report.notes.push_back("eps " + format_double(eps) + ": no hits, excluded");
    if (!row.excluded && e.probability < 1.0) {
      xs.push_back(std::log(1.0 / eps));
      ys.push_back(std::log(-std::log(e.probability)));
    }
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const SmallBallRow& a = report.rows[i - 1];
    const SmallBallRow& b = report.rows[i];
    if (b.probability > a.probability + 3.0 * std::hypot(a.se, b.se)) report.monotone = false;
  }
  if (xs.size() >= 2) {
    const LineFit fit = fit_line(xs, ys);
    report.fitted_exponent = fit.slope;
    report.intercept = fit.intercept;
  } else {
    report.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    report.notes.push_back("fewer than two usable eps values; no exponent fitted");
  }
  report.theory = small_ball_exponent(prior, options.beta);

  if (const auto* w = std::get_if<WaveletSeries>(&prior.variant)) {
    // Fit D at the smallest usable eps, then check the bound at the larger ones.
    for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
      if (it->excluded) continue;
      report.lemma_D = calibrate_lemma_constant(w->dist, w->alpha, options.beta, it->eps, std::log(it->probability));
      break;
    }
    if (report.lemma_D) {
      for (SmallBallRow& row : report.rows) {
        row.lemma_bound = small_ball_lower_bound_log(w->dist, w->alpha, options.beta, *report.lemma_D, row.eps);
        if (row.excluded) continue;
        row.bound_holds = row.lemma_bound <= std::log(row.probability + 3.0 * row.se);
        report.lemma_holds = report.lemma_holds && row.bound_holds;
      }
    }
  }

  report.pass = report.monotone && std::isfinite(report.fitted_exponent);
  if (options.tolerance) {
    report.pass = report.pass && report.theory &&
                  std::abs(report.fitted_exponent - *report.theory) <= *options.tolerance;
  }
  return report;
}

void DecayStudyConfig::validate() const {
  prior.validate();
  if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
  if (n_grid.size() < 2) throw std::invalid_argument("n_grid needs at least 2 values");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > 0.0)) throw std::invalid_argument("n_grid values must be positive");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) throw std::invalid_argument("n_grid must be strictly increasing");
  }
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
}

DecayStudyConfig parse_decay_study(const KeyValueConfig& cfg) {
  std::vector<std::string> known{"seed", "threads", "n_grid", "replicates", "r", "ceiling_tail", "ceiling_draws"};
  known.insert(known.end(), kSamplerKeys.begin(), kSamplerKeys.end());
  check_known(cfg, known, {"prior.", "f0."});
  DecayStudyConfig c;
  try {
    c.prior = parse_prior(cfg.subtree("prior."));
    c.f0 = parse_test_function(cfg.subtree("f0."));
    c.r = cfg.get_double("r", c.r);
    if (cfg.has("n_grid")) c.n_grid = cfg.get_doubles("n_grid");
    c.replicates = static_cast<std::size_t>(cfg.get_int("replicates", static_cast<long long>(c.replicates)));
    c.sampler = parse_sampler_kind(cfg.get_string("sampler", "mcmc"));
    c.importance_draws = static_cast<std::size_t>(cfg.get_int("draws", static_cast<long long>(c.importance_draws)));
    c.mcmc = parse_mcmc_options(cfg);
    c.ceiling_tail = cfg.get_double("ceiling_tail", c.ceiling_tail);
    c.ceiling_draws = static_cast<std::size_t>(cfg.get_int("ceiling_draws", static_cast<long long>(c.ceiling_draws)));
    c.seed = cfg.get_u64("seed", c.seed);
    c.threads = static_cast<unsigned>(cfg.get_int("threads", 1));
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
  return c;
}

DecayStudyReport run_posterior_decay_study(const DecayStudyConfig& cfg) {
  cfg.validate();
  DecayStudyReport report;
  report.prior_name = cfg.prior.name();
  report.r = cfg.r;
  const GridFunction f0 = cfg.f0.build();
  Rng ceiling_rng = make_rng(cfg.seed, kCeilingStream);
  report.ceiling = calibrate_ceiling(cfg.prior, f0, cfg.ceiling_tail, cfg.ceiling_draws, ceiling_rng);

  const std::size_t total = cfg.n_grid.size() * cfg.replicates;
  report.cells.resize(total);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    RateCell& cell = report.cells[i];
    cell.n_index = i / cfg.replicates;
    cell.replicate = i % cfg.replicates;
    cell.n = cfg.n_grid[cell.n_index];
    Rng rng = make_rng(cfg.seed, i);
    const PointPattern pattern = simulate_ppp(f0, cell.n, report.ceiling, rng);
    cell.points = pattern.size();
    try {
      const PosteriorEnsemble ens = run_sampler(cfg.sampler, cfg.prior, pattern, cfg.importance_draws, cfg.mcmc, rng);
      cell.error = mass_lower_part_at_least(ens, f0, cfg.r);
    } catch (const DegeneratePosteriorError& e) {
      cell.excluded = true;
      cell.note = e.what();
    }
  });

  std::size_t excluded = 0;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) {
    DecayPoint p;
    p.n = cfg.n_grid[k];
    std::vector<double> masses;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      const RateCell& c = report.cells[k * cfg.replicates + r];
      if (c.excluded) ++p.excluded;
      else masses.push_back(c.error);
    }
    p.included = masses.size();
    excluded += p.excluded;
    if (!masses.empty()) {
      p.median_mass = quantile(masses, 0.5);
      p.mean_mass = std::accumulate(masses.begin(), masses.end(), 0.0) / static_cast<double>(masses.size());
      double ss = 0.0;
      for (double m : masses) ss += (m - p.mean_mass) * (m - p.mean_mass);
      p.se = masses.size() > 1 ? std::sqrt(ss / static_cast<double>(masses.size() - 1) /
                                           static_cast<double>(masses.size()))
                               : 0.0;
      if (p.mean_mass > 0.0) {
        xs.push_back(p.n);
        ys.push_back(std::log(p.mean_mass));
      }
    }
    report.points.push_back(p);
  }
  // Medians may rise by Monte Carlo noise, taken as 3 standard errors of the mean.
  for (std::size_t k = 1; k < report.points.size(); ++k) {
    const DecayPoint& a = report.points[k - 1];
    const DecayPoint& b = report.points[k];
    if (b.median_mass > a.median_mass + 3.0 * std::max(a.se, b.se)) report.monotone = false;
  }
  report.too_many_exclusions = static_cast<double>(excluded) > 0.2 * static_cast<double>(total);
  if (report.too_many_exclusions)
    report.notes.push_back("excluded " + std::to_string(excluded) + " of " + std::to_string(total) +
                           " cells (limit 20%)");
  if (xs.size() >= 2) report.decay_slope = fit_line(xs, ys).slope;
  else report.notes.push_back("posterior mass vanishes at all but at most one n");
  report.pass = report.monotone && !report.too_many_exclusions &&
                (!report.decay_slope || *report.decay_slope <= 0.0);
  return report;
}

}  // namespace bbayes
