#include "bbayes/haar.hpp"

#include <cmath>
#include <stdexcept>

namespace bbayes {

WaveletCoefficients WaveletCoefficients::zeros(int max_level) {
  WaveletCoefficients c;
  for (int j = 0; j <= max_level; ++j) c.detail.emplace_back(std::size_t{1} << j, 0.0);
  return c;
}

double WaveletCoefficients::energy() const {
  double s = scaling * scaling;
  for (const auto& level : detail)
    for (double v : level) s += v * v;
  return s;
}

GridFunction haar_synthesis(const WaveletCoefficients& c, int grid_level) {
  const int top = c.max_level();
  if (top >= grid_level)
    throw std::invalid_argument("haar_synthesis: detail level " + std::to_string(top) +
                                " does not fit grid level " + std::to_string(grid_level));
  std::vector<double> values{c.scaling};
  for (int j = 0; j <= top; ++j) {
    const auto& level = c.detail[static_cast<std::size_t>(j)];
    if (level.size() != (std::size_t{1} << j))
      throw std::invalid_argument("haar_synthesis: level " + std::to_string(j) + " has wrong size");
    const double amp = std::exp2(0.5 * j);
    std::vector<double> next(values.size() * 2);
    for (std::size_t k = 0; k < values.size(); ++k) {
      next[2 * k] = values[k] + amp * level[k];
      next[2 * k + 1] = values[k] - amp * level[k];
    }
    values = std::move(next);
  }
  int level = 0;
  while ((std::size_t{1} << level) < values.size()) ++level;
  return GridFunction(level, std::move(values)).refined(grid_level);
}

WaveletCoefficients haar_analysis(const GridFunction& f) {
  const int levels = f.level();
  WaveletCoefficients c = WaveletCoefficients::zeros(levels - 1);
  std::vector<double> values(f.values().begin(), f.values().end());
  for (int j = levels - 1; j >= 0; --j) {
    const double amp = std::exp2(0.5 * j);
    std::vector<double> coarse(values.size() / 2);
    auto& level = c.detail[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      coarse[k] = 0.5 * (values[2 * k] + values[2 * k + 1]);
      level[k] = 0.5 * (values[2 * k] - values[2 * k + 1]) / amp;
    }
    values = std::move(coarse);
  }
  c.scaling = values.front();
  return c;
}

double l2_norm_sq(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return s / static_cast<double>(f.size());
}

}  // namespace bbayes
