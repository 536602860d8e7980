#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bbayes/distributions.hpp"
#include "bbayes/grid_function.hpp"
#include "bbayes/random.hpp"

namespace bbayes {

/// coef on bins [begin, end).
struct Segment {
  std::size_t begin;
  std::size_t end;
  double coef;
};

/// A line through coefficient space and the change it induces on the grid.
///
/// Moving theta by t * coords changes the function by t * pattern, whose
/// integral is t * mass.
struct Direction {
  std::vector<std::pair<std::size_t, double>> coords;
  std::vector<Segment> pattern;
  double mass = 0.0;
};

/// A prior whose draws are a fixed linear map of independent coordinates.
///
/// Covers the Haar series priors (coordinates are wavelet coefficients
/// including their amplitudes) and the Brownian prior (coordinates are the
/// start value and the grid increments). Coordinate 0 always shifts the
/// whole function by one unit.
class LinearModel {
 public:
  /// amplitudes[0] scales the father coefficient, amplitudes[j + 1] level j.
  static LinearModel haar(const CoefficientDistribution& dist, std::span<const double> amplitudes,
                          int grid_level);
  static LinearModel brownian(int grid_level);

  int grid_level() const { return grid_level_; }
  std::size_t bins() const { return std::size_t{1} << grid_level_; }
  std::size_t dimension() const { return laws_.size(); }
  const CoefficientDistribution& law(std::size_t i) const { return laws_[i]; }

  void synthesize(std::span<const double> theta, std::vector<double>& values) const;
  GridFunction synthesize(std::span<const double> theta) const;

  std::vector<double> sample_prior(Rng& rng) const;
  double log_prior(std::span<const double> theta) const;

  /// Moves swept by the Gibbs kernel, in sweep order.
  const std::vector<Direction>& gibbs_directions() const { return gibbs_; }
  /// The single-coordinate move of coordinate i.
  const Direction& coordinate_direction(std::size_t i) const { return coordinate_[i]; }

 private:
  enum class Kind { haar, brownian };
  Kind kind_ = Kind::haar;
  int grid_level_ = 0;
  int top_level_ = -1;  // highest Haar detail level
  std::vector<CoefficientDistribution> laws_;
  std::vector<Direction> coordinate_;
  std::vector<Direction> gibbs_;
};

/// A chain over the coefficients of a LinearModel restricted to
/// {f_k <= upper_k for all bins}, targeting prior(theta) * exp(n \int f).
///
/// The state is kept strictly inside the constraint by a relative margin of
/// 1e-12, so rounding in re-synthesis cannot push it out.
class ConstrainedChain {
 public:
  /// Starts from a prior draw, lowered by a constant shift until feasible.
  /// Throws DegeneratePosteriorError when the shift leaves the prior support.
  ConstrainedChain(const LinearModel& model, std::vector<double> upper, double n, Rng& rng);

  /// One pass over the model's directions, each drawn exactly from its
  /// one-dimensional conditional.
  void gibbs_sweep(Rng& rng);

  /// One pass of per-coordinate Gaussian random-walk Metropolis proposals
  /// with scale step_scale times the coordinate's prior standard deviation.
  /// Returns the number of accepted proposals.
  std::size_t random_walk_sweep(double step_scale, Rng& rng);

  std::span<const double> theta() const { return theta_; }
  GridFunction state() const;

 private:
  /// Feasible t-range of a move: [lo, hi], always containing 0.
  std::pair<double, double> interval(const Direction& d) const;
  void apply(const Direction& d, double t);
  void resync();

  const LinearModel* model_;
  std::vector<double> upper_;
  double n_;
  std::vector<double> theta_;
  std::vector<double> values_;
};

}  // namespace bbayes
