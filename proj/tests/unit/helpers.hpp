#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bbayes/grid_function.hpp"
#include "bbayes/random.hpp"

namespace testutil {

inline bbayes::GridFunction random_function(int level, bbayes::Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(std::size_t{1} << level);
  for (auto& x : v) x = lo + (hi - lo) * bbayes::uniform01(rng);
  return bbayes::GridFunction(level, std::move(v));
}

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Simpson on each piece between sorted breakpoints inside [a, b].
inline double simpson_pieces(const std::function<double(double)>& f, double a, double b,
                             std::vector<double> breaks, int panels = 2000) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
    // Stay off the breakpoints themselves, where a density may jump.
    const double nudge = 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi));
    if (hi - lo > 4 * nudge) s += simpson(f, lo + nudge, hi - nudge, panels);
  }
  return s;
}

inline double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return r;
}

}  // namespace testutil
