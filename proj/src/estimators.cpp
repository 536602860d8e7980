#include "bbayes/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbayes/model.hpp"

namespace bbayes {

double mle_lipschitz_value(const PointPattern& pattern, double lip, double cap, double x) {
  if (!(lip > 0.0)) throw std::invalid_argument("mle_lipschitz: lip must be positive");
  double v = cap;
  for (const Point& p : pattern.points()) v = std::min(v, p.y + lip * std::abs(x - p.x));
  return v;
}

GridFunction mle_lipschitz(const PointPattern& pattern, double lip, double cap, int grid_level) {
  if (!(lip > 0.0)) throw std::invalid_argument("mle_lipschitz: lip must be positive");
  const std::size_t m = std::size_t{1} << grid_level;
  std::vector<double> values(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
    values[k] = mle_lipschitz_value(pattern, lip, cap, mid);
  }
  const Envelope env(pattern, grid_level);
  for (std::size_t k = 0; k < m; ++k) values[k] = std::min(values[k], env[k]);
  return GridFunction(grid_level, std::move(values));
}

GridFunction mle_piecewise_constant(const PointPattern& pattern, std::size_t bins, double cap) {
  if (bins == 0 || (bins & (bins - 1)) != 0)
    throw std::invalid_argument("mle_piecewise_constant: bins must be a power of two");
  int level = 0;
  while ((std::size_t{1} << level) < bins) ++level;
  const Envelope env(pattern, level);
  std::vector<double> values(bins);
  for (std::size_t k = 0; k < bins; ++k) values[k] = std::min(env[k], cap);
  return GridFunction(level, std::move(values));
}

int np_test(const GridFunction& g, const PointPattern& pattern) {
  return constraint_satisfied(g, pattern) ? 1 : 0;
}

MleDominationReport check_posterior_below_mle(const PosteriorEnsemble& ens, const GridFunction& mle) {
  MleDominationReport report;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto [f, g] = common_level(ens.samples()[i], mle);
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] > g[k]) {
        report.dominated = false;
        report.violations.push_back({i, k, f[k] - g[k]});
      }
    }
  }
  return report;
}

}  // namespace bbayes
