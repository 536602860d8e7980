#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bbayes/grid_function.hpp"
#include "bbayes/posterior.hpp"

namespace bbayes {

/// min(cap, min_i (y_i + lip |x - x_i|)): the largest lip-Lipschitz function
/// below every data point and below cap.
double mle_lipschitz_value(const PointPattern& pattern, double lip, double cap, double x);

/// The Lipschitz MLE on a grid.
///
/// Each bin takes the analytic value at its midpoint, lowered where needed
/// to the smallest ordinate inside the bin so that the grid function is
/// exactly feasible under bin evaluation. Throws for lip <= 0.
GridFunction mle_lipschitz(const PointPattern& pattern, double lip, double cap, int grid_level = 8);

/// Per-bin minimum of the point ordinates (at most cap), cap in empty bins.
/// bins must be a power of two.
GridFunction mle_piecewise_constant(const PointPattern& pattern, std::size_t bins, double cap);

/// Neyman-Pearson test of f against g for f <= g: 1 iff no point lies below g.
int np_test(const GridFunction& g, const PointPattern& pattern);

struct MleDominationReport {
  bool dominated = true;
  struct Violation {
    std::size_t sample;
    std::size_t bin;
    double excess;
  };
  std::vector<Violation> violations;
};

/// Checks sample <= mle bin-wise for every sample, with no tolerance.
MleDominationReport check_posterior_below_mle(const PosteriorEnsemble& ens, const GridFunction& mle);

}  // namespace bbayes
