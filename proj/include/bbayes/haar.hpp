#pragma once

#include <vector>

#include "bbayes/grid_function.hpp"

namespace bbayes {

/// Coefficients in the L2-normalised Haar basis on [0,1].
///
/// psi_{j,k} = 2^{j/2} on the left half of [k 2^-j, (k+1) 2^-j) and
/// -2^{j/2} on the right half; the father function is 1.
struct WaveletCoefficients {
  double scaling = 0.0;
  std::vector<std::vector<double>> detail;  // detail[j].size() == 2^j

  /// Highest detail level present, or -1 for a pure constant.
  int max_level() const { return static_cast<int>(detail.size()) - 1; }

  static WaveletCoefficients zeros(int max_level);

  /// Sum of squares of all coefficients.
  double energy() const;

  bool operator==(const WaveletCoefficients&) const = default;
};

/// Exact piecewise-constant synthesis. Requires max_level() < grid_level,
/// otherwise the finest wavelets are not representable on the grid.
GridFunction haar_synthesis(const WaveletCoefficients& c, int grid_level);

/// Full analysis of f: details up to level f.level() - 1.
WaveletCoefficients haar_analysis(const GridFunction& f);

/// Squared L2 norm of a grid function.
double l2_norm_sq(const GridFunction& f);

}  // namespace bbayes
