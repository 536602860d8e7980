#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bbayes/grid_function.hpp"
#include "bbayes/priors.hpp"
#include "bbayes/random.hpp"

namespace bbayes {

struct PosteriorMeta {
  std::string sampler;
  double acceptance_rate = 0.0;  // MCMC only
  double ess = 0.0;
  std::size_t feasible_draws = 0;  // importance only
  std::size_t total_draws = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
  /// Posterior probability of each truncation level (truncated prior only).
  std::vector<double> level_weights;
};

/// Weighted draws approximating the posterior. Every stored sample is
/// feasible for the data it was built from.
class PosteriorEnsemble {
 public:
  PosteriorEnsemble(std::vector<GridFunction> samples, std::vector<double> log_weights,
                    PosteriorMeta meta);

  std::size_t size() const { return samples_.size(); }
  const std::vector<GridFunction>& samples() const { return samples_; }
  const std::vector<double>& log_weights() const { return log_weights_; }
  const PosteriorMeta& meta() const { return meta_; }
  PosteriorMeta& meta() { return meta_; }

  /// Self-normalised weights (nonnegative, summing to one).
  std::vector<double> weights() const;

 private:
  std::vector<GridFunction> samples_;
  std::vector<double> log_weights_;
  PosteriorMeta meta_;
};

/// n \int f if f is feasible for the pattern, -inf otherwise.
double log_posterior_weight(const GridFunction& f, const PointPattern& pattern);

/// Self-normalised importance sampling with the prior as proposal.
/// Throws DegeneratePosteriorError if no draw is feasible.
PosteriorEnsemble importance_posterior(const PriorSpec& prior, const PointPattern& pattern,
                                       std::size_t draws, Rng& rng);

enum class McmcKernel { gibbs, random_walk };

struct McmcOptions {
  std::size_t steps = 2000;  // sweeps per chain
  double step_scale = 0.5;   // random-walk kernel only
  McmcKernel kernel = McmcKernel::gibbs;
  double burn_in = 0.2;
  std::size_t thin = 0;  // 0: max(1, steps / 10^4)
  /// Prior draws per truncation level for non-gaussian level evidence.
  std::size_t evidence_draws = 4000;
};

/// Constrained Markov chain sampler.
///
/// Series priors move in coefficient space; the chain lives on the feasible
/// set {f <= bin minima of the data}, with empty bins bounded by the pattern
/// ceiling. The truncated prior runs one chain per level and weights the
/// levels by 2^{-j} times the level evidence. Finite priors use an
/// independence sampler with the prior as proposal.
PosteriorEnsemble mcmc_posterior(const PriorSpec& prior, const PointPattern& pattern,
                                 const McmcOptions& options, Rng& rng);
PosteriorEnsemble mcmc_posterior(const PriorSpec& prior, const PointPattern& pattern,
                                 std::size_t steps, double step_scale, Rng& rng);

/// log of E_prior[exp(n \int f) 1(f <= upper)] at truncation level j for a
/// gaussian truncated prior; exact.
double gaussian_level_log_evidence(const std::vector<double>& upper, int level, double scale, double n);

using Predicate = std::function<bool(const GridFunction&)>;

double posterior_mass(const PosteriorEnsemble& ens, const Predicate& predicate);
/// Mass of {||f - f0||_1 >= r}.
double mass_outside_l1_ball(const PosteriorEnsemble& ens, const GridFunction& f0, double r);
/// Mass of {\int (f0 - f)_+ >= r}.
double mass_lower_part_at_least(const PosteriorEnsemble& ens, const GridFunction& f0, double r);
/// Mass of {\int (f - f0)_+ >= r}.
double mass_upper_part_at_least(const PosteriorEnsemble& ens, const GridFunction& f0, double r);

GridFunction posterior_mean(const PosteriorEnsemble& ens);

/// Weighted q-quantile (lower) of a functional over the ensemble.
double posterior_quantile(const PosteriorEnsemble& ens,
                          const std::function<double(const GridFunction&)>& functional, double q);

/// Lower weighted quantile; weights need not be normalised.
double weighted_quantile(std::vector<double> values, std::vector<double> weights, double q);

/// Columns: index,integral[,l1_to_f0],weight.
void write_summary_csv(std::ostream& os, const PosteriorEnsemble& ens,
                       const std::optional<GridFunction>& f0 = std::nullopt);

/// One GridFunction CSV block per sample, each preceded by "# weight=<w>".
void write_ensemble(std::ostream& os, const PosteriorEnsemble& ens);

}  // namespace bbayes
