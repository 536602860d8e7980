#pragma once

#include <vector>

#include "bbayes/grid_function.hpp"
#include "bbayes/random.hpp"

namespace bbayes {

// Functionals of the support-boundary model with intensity n * 1(f(x) <= y).

/// Exact integral of the piecewise-constant function (mean of the bins).
double integral(const GridFunction& f);

double l1_distance(const GridFunction& f, const GridFunction& g);
double sup_distance(const GridFunction& f, const GridFunction& g);

/// \int (f - g)_+ on the common grid.
double positive_part_integral(const GridFunction& f, const GridFunction& g);

/// exp(-(n/2) ||f - g||_1), the Hellinger affinity of P_f and P_g.
double hellinger_affinity(const GridFunction& f, const GridFunction& g, double n);

/// 2 - 2 * affinity.
double hellinger_distance_sq(const GridFunction& f, const GridFunction& g, double n);

/// KL(P_f0, P_f): n ||f0 - f||_1 when f <= f0 on every bin, +inf otherwise.
double kl_divergence(const GridFunction& f0, const GridFunction& f, double n);

/// Draws the process on the window {f(x) <= y <= ceiling}.
///
/// Each bin receives an independent Poisson(n * (ceiling - f_k)_+ / m) count
/// and its points are uniform on the bin's rectangle, so the total count is
/// Poisson(n * \int (ceiling - f)_+). Throws std::invalid_argument for n <= 0.
PointPattern simulate_ppp(const GridFunction& f, double n, double ceiling, Rng& rng);

/// True iff f(x_i) <= y_i for every point, evaluating f on its bins.
bool constraint_satisfied(const GridFunction& f, const PointPattern& pattern);

/// log dP_f/dP_g: n (\int f - \int g) if the data are feasible for f, -inf if not.
/// Throws DominationError unless g <= f on every bin.
double log_likelihood_ratio(const GridFunction& f, const GridFunction& g,
                            const PointPattern& pattern, double n);

/// H(f) = exp(n \int (f - f0)) * 1(data feasible for max(f, f0)).
double h_statistic(const GridFunction& f, const GridFunction& f0, const PointPattern& pattern,
                   double n);

/// Per-bin minimum of the point ordinates at a given grid level.
///
/// For a piecewise-constant f on that level, constraint_satisfied(f, pattern)
/// holds iff f_k <= minima[k] for every k. Empty bins hold +inf.
class Envelope {
 public:
  Envelope(const PointPattern& pattern, int level);

  int level() const { return level_; }
  std::size_t size() const { return minima_.size(); }
  double operator[](std::size_t k) const { return minima_[k]; }
  const std::vector<double>& minima() const { return minima_; }

  /// Bin minima after merging into 2^level blocks (level <= this->level()).
  Envelope coarsened(int level) const;

  /// Feasibility of a function on this envelope's level or coarser.
  bool admits(const GridFunction& f) const;

 private:
  Envelope(int level, std::vector<double> minima) : level_(level), minima_(std::move(minima)) {}
  int level_;
  std::vector<double> minima_;
};

}  // namespace bbayes
