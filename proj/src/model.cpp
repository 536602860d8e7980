#include "bbayes/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bbayes/errors.hpp"

namespace bbayes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_intensity(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("intensity n must be positive");
}
}  // namespace

double integral(const GridFunction& f) {
  const auto v = f.values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double l1_distance(const GridFunction& f, const GridFunction& g) {
  auto [a, b] = common_level(f, g);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s / static_cast<double>(a.size());
}

double sup_distance(const GridFunction& f, const GridFunction& g) {
  auto [a, b] = common_level(f, g);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

double positive_part_integral(const GridFunction& f, const GridFunction& g) {
  auto [a, b] = common_level(f, g);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::max(a[k] - b[k], 0.0);
  return s / static_cast<double>(a.size());
}

double hellinger_affinity(const GridFunction& f, const GridFunction& g, double n) {
  check_intensity(n);
  return std::exp(-0.5 * n * l1_distance(f, g));
}

double hellinger_distance_sq(const GridFunction& f, const GridFunction& g, double n) {
  check_intensity(n);
  return -2.0 * std::expm1(-0.5 * n * l1_distance(f, g));
}

double kl_divergence(const GridFunction& f0, const GridFunction& f, double n) {
  check_intensity(n);
  if (!dominated_by(f, f0)) return kInf;
  return n * l1_distance(f0, f);
}

PointPattern simulate_ppp(const GridFunction& f, double n, double ceiling, Rng& rng) {
  check_intensity(n);
  PointPattern pattern(n, ceiling);
  const std::size_t m = f.size();
  const double width = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double height = ceiling - f[k];
    if (!(height > 0.0)) continue;
    std::poisson_distribution<long> count(n * height * width);
    const long c = count(rng);
    for (long i = 0; i < c; ++i) {
      const double x = (static_cast<double>(k) + uniform01(rng)) * width;
      const double y = f[k] + uniform01(rng) * height;
      pattern.add({x, std::min(y, ceiling)});
    }
  }
  return pattern;
}

bool constraint_satisfied(const GridFunction& f, const PointPattern& pattern) {
  for (const Point& p : pattern.points())
    if (f.at(p.x) > p.y) return false;
  return true;
}

double log_likelihood_ratio(const GridFunction& f, const GridFunction& g,
                            const PointPattern& pattern, double n) {
  check_intensity(n);
  if (!dominated_by(g, f))
    throw DominationError("log_likelihood_ratio: g is not below f, P_g does not dominate P_f");
  if (!constraint_satisfied(f, pattern)) return -kInf;
  return n * (integral(f) - integral(g));
}

double h_statistic(const GridFunction& f, const GridFunction& f0, const PointPattern& pattern,
                   double n) {
  check_intensity(n);
  if (!constraint_satisfied(pointwise_max(f, f0), pattern)) return 0.0;
  return std::exp(n * (integral(f) - integral(f0)));
}

Envelope::Envelope(const PointPattern& pattern, int level)
    : level_(level), minima_(std::size_t{1} << level, kInf) {
  const GridFunction probe = GridFunction::constant(level, 0.0);
  for (const Point& p : pattern.points()) {
    double& slot = minima_[probe.bin_of(p.x)];
    slot = std::min(slot, p.y);
  }
}

Envelope Envelope::coarsened(int level) const {
  if (level > level_) throw std::invalid_argument("Envelope::coarsened: target level is finer");
  const std::size_t blocks = std::size_t{1} << level;
  const std::size_t per = minima_.size() / blocks;
  std::vector<double> out(blocks, kInf);
  for (std::size_t k = 0; k < minima_.size(); ++k)
    out[k / per] = std::min(out[k / per], minima_[k]);
  return Envelope(level, std::move(out));
}

bool Envelope::admits(const GridFunction& f) const {
  if (f.level() > level_) throw std::invalid_argument("Envelope::admits: function finer than envelope");
  const Envelope coarse = f.level() == level_ ? *this : coarsened(f.level());
  for (std::size_t k = 0; k < f.size(); ++k)
    if (f[k] > coarse.minima_[k]) return false;
  return true;
}

}  // namespace bbayes
