#include "bbayes/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "bbayes/errors.hpp"
#include "bbayes/linear_model.hpp"
#include "bbayes/model.hpp"

namespace bbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double top = -kInf;
  for (double x : xs) top = std::max(top, x);
  if (top == -kInf) return -kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - top);
  return top + std::log(s);
}

double ess_of(const std::vector<double>& log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double s1 = 0.0, s2 = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - top);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

// Integrated autocorrelation time by Geyer's initial positive sequence.
double autocorrelation_time(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return 1.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  auto acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) return 1.0;
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (acov(2 * k) + acov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return std::max(tau, 1.0);
}

std::vector<double> sampler_upper(const PointPattern& pattern, int grid_level) {
  std::vector<double> upper = Envelope(pattern, grid_level).minima();
  for (double& u : upper) u = std::min(u, pattern.ceiling());
  return upper;
}

std::vector<double> block_minima(const std::vector<double>& upper, std::size_t blocks) {
  const std::size_t per = upper.size() / blocks;
  std::vector<double> out(blocks, kInf);
  for (std::size_t k = 0; k < upper.size(); ++k) out[k / per] = std::min(out[k / per], upper[k]);
  return out;
}

std::size_t default_thin(const McmcOptions& o) {
  return o.thin > 0 ? o.thin : std::max<std::size_t>(1, o.steps / 10000);
}

struct ChainRun {
  std::vector<GridFunction> samples;
  double acceptance = 1.0;
};

ChainRun run_linear_chain(const LinearModel& model, const std::vector<double>& upper, double n,
                          const McmcOptions& o, Rng& rng) {
  ConstrainedChain chain(model, upper, n, rng);
  const auto burn = static_cast<std::size_t>(o.burn_in * static_cast<double>(o.steps));
  const std::size_t thin = default_thin(o);
  ChainRun run;
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  for (std::size_t step = 0; step < o.steps; ++step) {
    if (o.kernel == McmcKernel::gibbs) {
      chain.gibbs_sweep(rng);
    } else {
      accepted += chain.random_walk_sweep(o.step_scale, rng);
      proposed += model.dimension();
    }
    if (step >= burn && (step - burn) % thin == 0) run.samples.push_back(chain.state());
  }
  if (run.samples.empty()) run.samples.push_back(chain.state());
  if (o.kernel == McmcKernel::random_walk)
    run.acceptance = static_cast<double>(accepted) / static_cast<double>(std::max<std::size_t>(proposed, 1));
  return run;
}

ChainRun run_finite_chain(const FiniteSupport& prior, const Envelope& env, double n,
                          const McmcOptions& o, Rng& rng) {
  std::vector<double> log_target(prior.atoms.size());
  bool any = false;
  for (std::size_t i = 0; i < prior.atoms.size(); ++i) {
    log_target[i] = env.admits(prior.atoms[i]) ? n * integral(prior.atoms[i]) : -kInf;
    any = any || log_target[i] > -kInf;
  }
  if (!any) throw DegeneratePosteriorError("no atom of the finite prior is feasible for the data");
  std::size_t current = sample_finite_prior(prior, rng);
  while (log_target[current] == -kInf) current = sample_finite_prior(prior, rng);

  const auto burn = static_cast<std::size_t>(o.burn_in * static_cast<double>(o.steps));
  const std::size_t thin = default_thin(o);
  ChainRun run;
  std::size_t accepted = 0;
  for (std::size_t step = 0; step < o.steps; ++step) {
    const std::size_t proposal = sample_finite_prior(prior, rng);
    const double log_ratio = log_target[proposal] - log_target[current];
    if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
      current = proposal;
      ++accepted;
    }
    if (step >= burn && (step - burn) % thin == 0) run.samples.push_back(prior.atoms[current]);
  }
  if (run.samples.empty()) run.samples.push_back(prior.atoms[current]);
  run.acceptance = static_cast<double>(accepted) / static_cast<double>(std::max<std::size_t>(o.steps, 1));
  return run;
}

double chain_ess(const std::vector<GridFunction>& samples) {
  std::vector<double> trace;
  trace.reserve(samples.size());
  for (const auto& f : samples) trace.push_back(integral(f));
  return static_cast<double>(samples.size()) / autocorrelation_time(trace);
}

void check_acceptance(PosteriorMeta& meta, const McmcOptions& o) {
  if (o.kernel == McmcKernel::gibbs && meta.sampler != "mcmc_independence") return;
  if (meta.acceptance_rate < 0.05 || meta.acceptance_rate > 0.95)
    meta.warnings.push_back("acceptance rate " + format_double(meta.acceptance_rate) +
                            " outside [0.05, 0.95]");
}

}  // namespace

PosteriorEnsemble::PosteriorEnsemble(std::vector<GridFunction> samples, std::vector<double> log_weights,
                                     PosteriorMeta meta)
    : samples_(std::move(samples)), log_weights_(std::move(log_weights)), meta_(std::move(meta)) {
  if (samples_.empty()) throw std::invalid_argument("PosteriorEnsemble: no samples");
  if (samples_.size() != log_weights_.size())
    throw std::invalid_argument("PosteriorEnsemble: samples and weights differ in length");
  if (!(log_sum_exp(log_weights_) > -kInf))
    throw std::invalid_argument("PosteriorEnsemble: all weights are zero");
}

std::vector<double> PosteriorEnsemble::weights() const {
  const double total = log_sum_exp(log_weights_);
  std::vector<double> w(log_weights_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights_[i] - total);
  return w;
}

double log_posterior_weight(const GridFunction& f, const PointPattern& pattern) {
  if (!constraint_satisfied(f, pattern)) return -kInf;
  return pattern.intensity() * integral(f);
}

PosteriorEnsemble importance_posterior(const PriorSpec& prior, const PointPattern& pattern,
                                       std::size_t draws, Rng& rng) {
  if (draws < 1) throw std::invalid_argument("importance_posterior: draws must be >= 1");
  prior.validate();
  const Envelope env(pattern, prior.grid_level);
  const double n = pattern.intensity();
  std::vector<GridFunction> samples;
  std::vector<double> log_weights;
  for (std::size_t i = 0; i < draws; ++i) {
    GridFunction f = sample_prior(prior, rng);
    if (!env.admits(f)) continue;
    log_weights.push_back(n * integral(f));
    samples.push_back(std::move(f));
  }
  if (samples.empty())
    throw DegeneratePosteriorError("degenerate posterior estimate: none of " + std::to_string(draws) +
                                   " prior draws is feasible for the data; use the MCMC sampler");
  PosteriorMeta meta;
  meta.sampler = "importance";
  meta.feasible_draws = samples.size();
  meta.total_draws = draws;
  meta.ess = ess_of(log_weights);
  return PosteriorEnsemble(std::move(samples), std::move(log_weights), std::move(meta));
}

double gaussian_level_log_evidence(const std::vector<double>& upper, int level, double scale, double n) {
  // Block values at level J are i.i.d. N(0, s^2 B) with B = 2^{J+1} blocks.
  const std::size_t blocks = std::size_t{1} << (level + 1);
  const double B = static_cast<double>(blocks);
  const double sd = scale * std::sqrt(B);
  const std::vector<double> minima = block_minima(upper, blocks);
  double total = 0.0;
  for (double M : minima) {
    const double a = n / B;
    total += 0.5 * a * a * sd * sd;
    if (std::isfinite(M)) total += log_normal_cdf((M - a * sd * sd) / sd);
  }
  return total;
}

PosteriorEnsemble mcmc_posterior(const PriorSpec& prior, const PointPattern& pattern,
                                 const McmcOptions& o, Rng& rng) {
  if (o.steps < 1) throw std::invalid_argument("mcmc_posterior: steps must be >= 1");
  if (!(o.step_scale > 0.0)) throw std::invalid_argument("mcmc_posterior: step_scale must be > 0");
  if (!(o.burn_in >= 0.0 && o.burn_in < 1.0))
    throw std::invalid_argument("mcmc_posterior: burn_in must lie in [0, 1)");
  prior.validate();
  const double n = pattern.intensity();
  PosteriorMeta meta;
  meta.total_draws = o.steps;

  if (const auto* fin = std::get_if<FiniteSupport>(&prior.variant)) {
    ChainRun run = run_finite_chain(*fin, Envelope(pattern, prior.grid_level), n, o, rng);
    meta.sampler = "mcmc_independence";
    meta.acceptance_rate = run.acceptance;
    meta.ess = chain_ess(run.samples);
    check_acceptance(meta, o);
    std::vector<double> lw(run.samples.size(), 0.0);
    return PosteriorEnsemble(std::move(run.samples), std::move(lw), std::move(meta));
  }

  meta.sampler = o.kernel == McmcKernel::gibbs ? "mcmc_gibbs" : "mcmc_random_walk";
  const std::vector<double> upper = sampler_upper(pattern, prior.grid_level);

  if (const auto* tr = std::get_if<TruncatedWavelet>(&prior.variant)) {
    const auto law = truncation_level_law(tr->j_cap);
    std::vector<double> log_w(law.size());
    for (int j = 0; j <= tr->j_cap; ++j) {
      double log_z;
      if (tr->dist.kind == CoefficientKind::gaussian) {
        log_z = gaussian_level_log_evidence(upper, j, tr->dist.scale, n);
      } else {
        // Prior importance estimate of the level evidence.
        std::vector<double> amps(static_cast<std::size_t>(j) + 2, 1.0);
        const LinearModel model = LinearModel::haar(tr->dist, amps, prior.grid_level);
        std::vector<double> terms;
        std::vector<double> values;
        for (std::size_t i = 0; i < o.evidence_draws; ++i) {
          model.synthesize(model.sample_prior(rng), values);
          bool ok = true;
          double s = 0.0;
          for (std::size_t k = 0; k < values.size(); ++k) {
            ok = ok && values[k] <= upper[k];
            s += values[k];
          }
          terms.push_back(ok ? n * s / static_cast<double>(values.size()) : -kInf);
        }
        log_z = log_sum_exp(terms) - std::log(static_cast<double>(o.evidence_draws));
      }
      log_w[static_cast<std::size_t>(j)] = std::log(law[static_cast<std::size_t>(j)]) + log_z;
    }
    const double total = log_sum_exp(log_w);
    if (!(total > -kInf))
      throw DegeneratePosteriorError("truncated prior: every level has zero estimated evidence");
    meta.level_weights.resize(log_w.size());
    for (std::size_t j = 0; j < log_w.size(); ++j) meta.level_weights[j] = std::exp(log_w[j] - total);

    std::vector<GridFunction> samples;
    std::vector<double> lw;
    double acc_sum = 0.0;
    double ess_inv = 0.0;
    for (int j = 0; j <= tr->j_cap; ++j) {
      const double wj = meta.level_weights[static_cast<std::size_t>(j)];
      if (wj < 1e-12) continue;
      std::vector<double> amps(static_cast<std::size_t>(j) + 2, 1.0);
      const LinearModel model = LinearModel::haar(tr->dist, amps, prior.grid_level);
      ChainRun run = run_linear_chain(model, upper, n, o, rng);
      const double each = std::log(wj) - std::log(static_cast<double>(run.samples.size()));
      ess_inv += wj * wj / chain_ess(run.samples);
      acc_sum += wj * run.acceptance;
      for (auto& f : run.samples) {
        samples.push_back(std::move(f));
        lw.push_back(each);
      }
    }
    meta.acceptance_rate = acc_sum;
    meta.ess = 1.0 / ess_inv;
    check_acceptance(meta, o);
    return PosteriorEnsemble(std::move(samples), std::move(lw), std::move(meta));
  }

  LinearModel model = [&] {
    if (const auto* w = std::get_if<WaveletSeries>(&prior.variant)) {
      std::vector<double> amps{1.0};
      for (int j = 0; j <= w->j_max; ++j) amps.push_back(detail_amplitude(w->alpha, j));
      return LinearModel::haar(w->dist, amps, prior.grid_level);
    }
    return LinearModel::brownian(prior.grid_level);
  }();
  ChainRun run = run_linear_chain(model, upper, n, o, rng);
  meta.acceptance_rate = run.acceptance;
  meta.ess = chain_ess(run.samples);
  check_acceptance(meta, o);
  std::vector<double> lw(run.samples.size(), 0.0);
  return PosteriorEnsemble(std::move(run.samples), std::move(lw), std::move(meta));
}

PosteriorEnsemble mcmc_posterior(const PriorSpec& prior, const PointPattern& pattern,
                                 std::size_t steps, double step_scale, Rng& rng) {
  McmcOptions o;
  o.steps = steps;
  o.step_scale = step_scale;
  return mcmc_posterior(prior, pattern, o, rng);
}

double posterior_mass(const PosteriorEnsemble& ens, const Predicate& predicate) {
  const std::vector<double> w = ens.weights();
  double mass = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (predicate(ens.samples()[i])) mass += w[i];
  return std::clamp(mass, 0.0, 1.0);
}

double mass_outside_l1_ball(const PosteriorEnsemble& ens, const GridFunction& f0, double r) {
  return posterior_mass(ens, [&](const GridFunction& f) { return l1_distance(f, f0) >= r; });
}

double mass_lower_part_at_least(const PosteriorEnsemble& ens, const GridFunction& f0, double r) {
  return posterior_mass(ens, [&](const GridFunction& f) { return positive_part_integral(f0, f) >= r; });
}

double mass_upper_part_at_least(const PosteriorEnsemble& ens, const GridFunction& f0, double r) {
  return posterior_mass(ens, [&](const GridFunction& f) { return positive_part_integral(f, f0) >= r; });
}

GridFunction posterior_mean(const PosteriorEnsemble& ens) {
  const std::vector<double> w = ens.weights();
  int level = 0;
  for (const auto& f : ens.samples()) level = std::max(level, f.level());
  std::vector<double> acc(std::size_t{1} << level, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const GridFunction f = ens.samples()[i].refined(level);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w[i] * f[k];
  }
  return GridFunction(level, std::move(acc));
}

double weighted_quantile(std::vector<double> values, std::vector<double> weights, double q) {
  if (values.empty() || values.size() != weights.size())
    throw std::invalid_argument("weighted_quantile: bad input sizes");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("weighted_quantile: q outside [0, 1]");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += weights[i];
    if (acc >= q * total) return values[i];
  }
  return values[order.back()];
}

double posterior_quantile(const PosteriorEnsemble& ens,
                          const std::function<double(const GridFunction&)>& functional, double q) {
  std::vector<double> values;
  values.reserve(ens.size());
  for (const auto& f : ens.samples()) values.push_back(functional(f));
  return weighted_quantile(std::move(values), ens.weights(), q);
}

void write_summary_csv(std::ostream& os, const PosteriorEnsemble& ens, const std::optional<GridFunction>& f0) {
  os << (f0 ? "index,integral,l1_to_f0,weight\n" : "index,integral,weight\n");
  const std::vector<double> w = ens.weights();
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const GridFunction& f = ens.samples()[i];
    os << i << ',' << format_double(integral(f));
    if (f0) os << ',' << format_double(l1_distance(f, *f0));
    os << ',' << format_double(w[i]) << '\n';
  }
}

void write_ensemble(std::ostream& os, const PosteriorEnsemble& ens) {
  const std::vector<double> w = ens.weights();
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const GridFunction& f = ens.samples()[i];
    os << "# grid_level=" << f.level() << " weight=" << format_double(w[i]) << '\n';
    for (double v : f.values()) os << format_double(v) << '\n';
  }
}

}  // namespace bbayes
