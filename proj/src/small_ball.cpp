#include "bbayes/small_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bbayes/model.hpp"

namespace bbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo;
  double hi;
};

double log_mean_exp(const std::vector<double>& xs) {
  double top = -kInf;
  for (double x : xs) top = std::max(top, x);
  if (top == -kInf) return -kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - top);
  return top + std::log(s / static_cast<double>(xs.size()));
}

// Multinomial resampling of indices by log-weights.
std::vector<std::size_t> resample(const std::vector<double>& log_w, std::size_t count, Rng& rng) {
  double top = -kInf;
  for (double x : log_w) top = std::max(top, x);
  std::vector<double> cum(log_w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    acc += std::exp(log_w[i] - top);
    cum[i] = acc;
  }
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform01(rng) * acc;
    out[i] = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    out[i] = std::min(out[i], log_w.size() - 1);
  }
  return out;
}

// Windows [max h - eps, min h + eps] over `blocks` equal blocks of h.
std::vector<Interval> block_windows(const GridFunction& h, std::size_t blocks, double eps) {
  std::vector<Interval> w(blocks, Interval{-kInf, kInf});
  const std::size_t per = h.size() / blocks;
  for (std::size_t k = 0; k < h.size(); ++k) {
    Interval& b = w[k / per];
    b.lo = std::max(b.lo, h[k] - eps);
    b.hi = std::min(b.hi, h[k] + eps);
  }
  return w;
}

double log_gauss_mass(Interval I, double sd) {
  if (!(I.lo < I.hi)) return -kInf;
  return log_normal_mass(I.lo / sd, I.hi / sd);
}

// One run of the tree splitting estimator for a Haar series with
// per-level amplitudes (amps[0]: father, amps[j + 1]: level j).
double haar_tree_log_estimate(const CoefficientDistribution& dist, const std::vector<double>& amps,
                              int grid_level, const GridFunction& h, double eps, std::size_t particles,
                              Rng& rng) {
  const int top = static_cast<int>(amps.size()) - 2;
  const int level = std::max(grid_level, h.level());
  const GridFunction hr = h.refined(level);
  const std::size_t leaves = std::size_t{1} << (top + 1);
  const std::vector<Interval> windows = block_windows(hr, leaves, eps);

  // Standard deviation of the ancestor offset seen by a node at level j.
  std::vector<double> offset_sd(static_cast<std::size_t>(top) + 2);
  double var = amps[0] * amps[0];
  for (int j = 0; j <= top + 1; ++j) {
    offset_sd[static_cast<std::size_t>(j)] = std::sqrt(dist.variance() * var);
    if (j <= top) var += std::exp2(j) * amps[static_cast<std::size_t>(j) + 1] * amps[static_cast<std::size_t>(j) + 1];
  }

  struct Population {
    std::vector<Interval> items;
    std::vector<double> log_w;
    double log_z = 0.0;
  };

  std::vector<Population> nodes(leaves);
  const double leaf_sd = offset_sd[static_cast<std::size_t>(top) + 1];
  for (std::size_t b = 0; b < leaves; ++b) {
    const double lg = log_gauss_mass(windows[b], leaf_sd);
    if (lg == -kInf) return -kInf;
    nodes[b].items.assign(1, windows[b]);
    nodes[b].log_w.assign(1, 0.0);
    nodes[b].log_z = lg;
  }

  for (int j = top; j >= 0; --j) {
    const double c = std::exp2(0.5 * j) * amps[static_cast<std::size_t>(j) + 1];
    const CoefficientDistribution unit = dist;
    const double sd_here = offset_sd[static_cast<std::size_t>(j)];
    const double sd_child = offset_sd[static_cast<std::size_t>(j) + 1];
    std::vector<Population> next(nodes.size() / 2);
    for (std::size_t k = 0; k < next.size(); ++k) {
      const Population& L = nodes[2 * k];
      const Population& R = nodes[2 * k + 1];
      const auto li = resample(L.log_w, particles, rng);
      const auto ri = resample(R.log_w, particles, rng);
      Population& P = next[k];
      P.items.resize(particles);
      P.log_w.resize(particles);
      for (std::size_t i = 0; i < particles; ++i) {
        const Interval a = L.items[li[i]];
        const Interval b = R.items[ri[i]];
        // Parent coefficient range for which the two offset sets overlap.
        const double t_lo = (a.lo - b.hi) / (2.0 * c);
        const double t_hi = (a.hi - b.lo) / (2.0 * c);
        const double log_pt = log_law_mass(unit, t_lo, t_hi);
        if (log_pt == -kInf) {
          P.items[i] = Interval{0.0, 0.0};
          P.log_w[i] = -kInf;
          continue;
        }
        const double t = sample_truncated(unit, t_lo, t_hi, rng);
        const Interval I{std::max(a.lo - c * t, b.lo + c * t), std::min(a.hi - c * t, b.hi + c * t)};
        P.items[i] = I;
        P.log_w[i] = log_pt + log_gauss_mass(I, sd_here) - log_gauss_mass(a, sd_child) -
                     log_gauss_mass(b, sd_child);
      }
      const double lm = log_mean_exp(P.log_w);
      if (lm == -kInf) return -kInf;
      P.log_z = L.log_z + R.log_z + lm;
    }
    nodes = std::move(next);
  }

  // Father coefficient: exact probability of landing in the offset interval.
  const Population& root = nodes.front();
  const double sd_root = offset_sd[0];
  const auto idx = resample(root.log_w, particles, rng);
  std::vector<double> final_w(particles);
  for (std::size_t i = 0; i < particles; ++i) {
    const Interval I = root.items[idx[i]];
    final_w[i] = log_law_mass(dist, I.lo / amps[0], I.hi / amps[0]) - log_gauss_mass(I, sd_root);
  }
  return root.log_z + log_mean_exp(final_w);
}

// One run of the left-to-right splitting estimator for the Brownian prior.
double brownian_log_estimate(int grid_level, const GridFunction& h, double eps, std::size_t particles,
                             Rng& rng) {
  const int level = std::max(grid_level, h.level());
  const GridFunction hr = h.refined(level);
  const std::size_t m = std::size_t{1} << grid_level;
  const std::vector<Interval> windows = block_windows(hr, m, eps);
  const double step_sd = 1.0 / std::sqrt(static_cast<double>(m));

  std::vector<double> value(particles, 0.0);
  std::vector<double> log_w(particles, 0.0);
  double log_z = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Interval W = windows[k];
    if (!(W.lo < W.hi)) return -kInf;
    for (std::size_t i = 0; i < particles; ++i) {
      if (log_w[i] == -kInf) continue;
      // Bin 0 carries the start value plus the first increment.
      const double mean = k == 0 ? 0.0 : value[i];
      const double sd = k == 0 ? std::sqrt(1.0 + 1.0 / static_cast<double>(m)) : step_sd;
      const double a = (W.lo - mean) / sd;
      const double b = (W.hi - mean) / sd;
      const double lm = log_normal_mass(a, b);
      if (lm == -kInf) {
        log_w[i] = -kInf;
        continue;
      }
      value[i] = mean + sd * truncated_standard_normal(a, b, rng);
      log_w[i] += lm;
    }
    // Resample when the effective sample size halves.
    double top = -kInf;
    for (double x : log_w) top = std::max(top, x);
    if (top == -kInf) return -kInf;
    double s1 = 0.0, s2 = 0.0;
    for (double x : log_w) {
      const double w = std::exp(x - top);
      s1 += w;
      s2 += w * w;
    }
    if (s1 * s1 / s2 < 0.5 * static_cast<double>(particles) || k + 1 == m) {
      log_z += log_mean_exp(log_w);
      if (k + 1 == m) break;
      const auto idx = resample(log_w, particles, rng);
      std::vector<double> v(particles);
      for (std::size_t i = 0; i < particles; ++i) v[i] = value[idx[i]];
      value = std::move(v);
      std::fill(log_w.begin(), log_w.end(), 0.0);
    }
  }
  return log_z;
}

SmallBallEstimate summarize_runs(const std::vector<double>& log_estimates, const std::string& method) {
  SmallBallEstimate e;
  e.method = method;
  e.runs = log_estimates.size();
  std::vector<double> p(log_estimates.size());
  for (std::size_t r = 0; r < p.size(); ++r) {
    p[r] = std::exp(log_estimates[r]);
    if (p[r] > 0.0) ++e.hits;
  }
  double mean = 0.0;
  for (double v : p) mean += v;
  mean /= static_cast<double>(p.size());
  double ss = 0.0;
  for (double v : p) ss += (v - mean) * (v - mean);
  e.probability = std::min(mean, 1.0);
  e.se = p.size() > 1 ? std::sqrt(ss / static_cast<double>(p.size() - 1) / static_cast<double>(p.size())) : 0.0;
  return e;
}

}  // namespace

std::string to_string(SmallBallMethod m) {
  switch (m) {
    case SmallBallMethod::automatic: return "automatic";
    case SmallBallMethod::plain: return "plain";
    case SmallBallMethod::splitting: return "splitting";
  }
  return "?";
}

SmallBallMethod parse_small_ball_method(const std::string& s) {
  if (s == "automatic" || s == "auto") return SmallBallMethod::automatic;
  if (s == "plain") return SmallBallMethod::plain;
  if (s == "splitting") return SmallBallMethod::splitting;
  throw std::invalid_argument("unknown small-ball method '" + s + "'");
}

SmallBallEstimate small_ball_probability(const PriorSpec& prior, const GridFunction& h, double eps,
                                         std::size_t particles, std::size_t runs, Rng& rng,
                                         SmallBallMethod method) {
  if (!(eps > 0.0)) throw std::invalid_argument("small_ball_probability: eps must be positive");
  if (particles < 1 || runs < 1)
    throw std::invalid_argument("small_ball_probability: particles and runs must be >= 1");
  prior.validate();

  if (const auto* fin = std::get_if<FiniteSupport>(&prior.variant);
      fin && method != SmallBallMethod::plain) {
    SmallBallEstimate e;
    e.method = "exact";
    for (std::size_t i = 0; i < fin->atoms.size(); ++i)
      if (sup_distance(fin->atoms[i], h) <= eps) {
        e.probability += fin->weights[i];
        ++e.hits;
      }
    e.probability = std::min(e.probability, 1.0);
    return e;
  }

  if (method == SmallBallMethod::plain) {
    SmallBallEstimate e;
    e.method = "plain";
    e.runs = particles * runs;
    for (std::size_t i = 0; i < e.runs; ++i)
      if (sup_distance(sample_prior(prior, rng), h) <= eps) ++e.hits;
    const double n = static_cast<double>(e.runs);
    e.probability = static_cast<double>(e.hits) / n;
    e.se = std::sqrt(e.probability * (1.0 - e.probability) / n);
    return e;
  }

  std::vector<double> logs(runs);
  if (std::holds_alternative<BrownianStart>(prior.variant)) {
    for (auto& l : logs) l = brownian_log_estimate(prior.grid_level, h, eps, particles, rng);
  } else if (const auto* w = std::get_if<WaveletSeries>(&prior.variant)) {
    std::vector<double> amps{1.0};
    for (int j = 0; j <= w->j_max; ++j) amps.push_back(detail_amplitude(w->alpha, j));
    for (auto& l : logs) l = haar_tree_log_estimate(w->dist, amps, prior.grid_level, h, eps, particles, rng);
  } else if (const auto* t = std::get_if<TruncatedWavelet>(&prior.variant)) {
    const auto law = truncation_level_law(t->j_cap);
    for (auto& l : logs) {
      std::vector<double> terms;
      for (int j = 0; j <= t->j_cap; ++j) {
        const std::vector<double> amps(static_cast<std::size_t>(j) + 2, 1.0);
        terms.push_back(std::log(law[static_cast<std::size_t>(j)]) +
                        haar_tree_log_estimate(t->dist, amps, prior.grid_level, h, eps, particles, rng));
      }
      l = log_mean_exp(terms) + std::log(static_cast<double>(terms.size()));
    }
  }
  return summarize_runs(logs, "splitting");
}

}  // namespace bbayes
