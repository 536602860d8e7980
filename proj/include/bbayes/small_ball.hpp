#pragma once

#include <cstddef>
#include <string>

#include "bbayes/grid_function.hpp"
#include "bbayes/priors.hpp"
#include "bbayes/random.hpp"

namespace bbayes {

enum class SmallBallMethod {
  automatic,   // splitting estimators where available, exact sum for finite priors
  plain,       // hit frequency of independent prior draws
  splitting,   // sequential / tree-structured importance splitting
};

std::string to_string(SmallBallMethod m);
SmallBallMethod parse_small_ball_method(const std::string& s);

struct SmallBallEstimate {
  double probability = 0.0;
  double se = 0.0;
  /// Independent runs (splitting) or prior draws (plain).
  std::size_t runs = 0;
  /// Plain MC: number of draws inside the ball. Splitting: runs with a
  /// nonzero estimate.
  std::size_t hits = 0;
  std::string method;
};

/// Estimates P(||X - h||_inf <= eps) for X drawn from the prior.
///
/// The splitting estimators are unbiased. For Haar series priors they grow
/// particle systems bottom-up over the wavelet tree: each subtree carries the
/// interval of ancestor offsets it tolerates, and a merge draws the parent
/// coefficient from its prior restricted to the nonempty overlaps. The
/// Brownian prior is grown left to right with increments drawn inside the
/// next bin's window. `particles` is the population size per run; the
/// standard error comes from `runs` independent runs.
SmallBallEstimate small_ball_probability(const PriorSpec& prior, const GridFunction& h, double eps,
                                         std::size_t particles, std::size_t runs, Rng& rng,
                                         SmallBallMethod method = SmallBallMethod::automatic);

}  // namespace bbayes
