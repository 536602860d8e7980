#include "bbayes/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bbayes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_normal_sf(double z) {
  if (z == kInf) return -kInf;
  if (z == -kInf) return 0.0;
  if (z < 0.0) return std::log1p(-0.5 * std::erfc(-z / std::numbers::sqrt2));
  if (z < 30.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Asymptotic Mills-ratio series; relative error below 1e-12 for z >= 30.
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * z * z - std::log(z) - kLogSqrt2Pi + std::log(series);
}

double log_normal_cdf(double z) { return log_normal_sf(-z); }

double log_normal_mass(double a, double b) {
  if (!(a < b)) return -kInf;
  if (a >= 0.0) {
    const double la = log_normal_sf(a);
    const double lb = log_normal_sf(b);
    return la + std::log(-std::expm1(lb - la));
  }
  if (b <= 0.0) {
    const double lb = log_normal_sf(-b);
    const double la = log_normal_sf(-a);
    return lb + std::log(-std::expm1(la - lb));
  }
  return std::log1p(-(std::exp(log_normal_sf(b)) + std::exp(log_normal_sf(-a))));
}

namespace {

// Tail sampler for [a, b] with a >= 0 (Robert, 1995).
double truncated_upper_tail(double a, double b, Rng& rng) {
  const double root = std::sqrt(a * a + 4.0);
  const double width_threshold =
      2.0 / (a + root) * std::exp((a * a - a * root) / 4.0 + 0.5);
  if (b - a < width_threshold) {
    // Uniform proposal; the density is decreasing on [a, b].
    for (;;) {
      const double z = a + (b - a) * uniform01(rng);
      if (uniform01(rng) <= std::exp(-0.5 * (z - a) * (z + a))) return z;
    }
  }
  const double lambda = 0.5 * (a + root);
  for (;;) {
    const double z = a + standard_exponential(rng) / lambda;
    if (z > b) continue;
    const double d = z - lambda;
    if (uniform01(rng) <= std::exp(-0.5 * d * d)) return z;
  }
}

}  // namespace

double truncated_standard_normal(double a, double b, Rng& rng) {
  if (std::isnan(a) || std::isnan(b) || a > b)
    throw std::invalid_argument("truncated_standard_normal: empty interval");
  if (a == b) return a;
  if (a >= 0.0) return truncated_upper_tail(a, b, rng);
  if (b <= 0.0) return -truncated_upper_tail(-b, -a, rng);
  if (b - a >= 2.0) {
    // Interval straddles zero and is wide: mass is at least ~0.47.
    for (;;) {
      const double z = standard_normal(rng);
      if (z >= a && z <= b) return z;
    }
  }
  for (;;) {
    const double z = a + (b - a) * uniform01(rng);
    if (uniform01(rng) <= std::exp(-0.5 * z * z)) return z;
  }
}

std::string to_string(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::gaussian: return "gaussian";
    case CoefficientKind::laplace: return "laplace";
    case CoefficientKind::uniform: return "uniform";
  }
  return "?";
}

CoefficientKind parse_coefficient_kind(const std::string& s) {
  if (s == "gaussian" || s == "normal") return CoefficientKind::gaussian;
  if (s == "laplace") return CoefficientKind::laplace;
  if (s == "uniform") return CoefficientKind::uniform;
  throw std::invalid_argument("unknown coefficient distribution '" + s + "'");
}

CoefficientDistribution::CoefficientDistribution(CoefficientKind k, double s) : kind(k), scale(s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("CoefficientDistribution: scale must be positive");
}

std::optional<double> CoefficientDistribution::tail_rate() const {
  switch (kind) {
    case CoefficientKind::laplace:
      return std::min(1.0 / scale, 2.0 * scale);
    case CoefficientKind::gaussian: {
      // Largest gamma with log(gamma) + gamma^2 s^2 / 2 <= log(sqrt(2 pi) s).
      const double target = std::log(scale) + kLogSqrt2Pi;
      auto excess = [&](double g) { return std::log(g) + 0.5 * g * g * scale * scale - target; };
      double lo = 1e-300, hi = 1.0;
      while (excess(hi) < 0.0) hi *= 2.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
      }
      return lo;
    }
    case CoefficientKind::uniform:
      return std::nullopt;
  }
  return std::nullopt;
}

double CoefficientDistribution::sample(Rng& rng) const {
  switch (kind) {
    case CoefficientKind::gaussian:
      return scale * standard_normal(rng);
    case CoefficientKind::laplace: {
      const double e = standard_exponential(rng);
      return uniform01(rng) < 0.5 ? -scale * e : scale * e;
    }
    case CoefficientKind::uniform:
      return scale * (2.0 * uniform01(rng) - 1.0);
  }
  return 0.0;
}

double CoefficientDistribution::variance() const {
  switch (kind) {
    case CoefficientKind::gaussian: return scale * scale;
    case CoefficientKind::laplace: return 2.0 * scale * scale;
    case CoefficientKind::uniform: return scale * scale / 3.0;
  }
  return 0.0;
}

double CoefficientDistribution::cdf(double x) const {
  switch (kind) {
    case CoefficientKind::gaussian:
      return normal_cdf(x / scale);
    case CoefficientKind::laplace:
      return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
    case CoefficientKind::uniform:
      return std::clamp((x + scale) / (2.0 * scale), 0.0, 1.0);
  }
  return 0.0;
}

double log_density_at(const CoefficientDistribution& dist, double x) {
  const double s = dist.scale;
  switch (dist.kind) {
    case CoefficientKind::gaussian:
      return -0.5 * (x / s) * (x / s) - std::log(s) - kLogSqrt2Pi;
    case CoefficientKind::laplace:
      return -std::abs(x) / s - std::log(2.0 * s);
    case CoefficientKind::uniform:
      return std::abs(x) <= s ? -std::log(2.0 * s) : -kInf;
  }
  return -kInf;
}

double density_at(const CoefficientDistribution& dist, double x) {
  return std::exp(log_density_at(dist, x));
}

CoefficientDistribution scaled(const CoefficientDistribution& dist, double factor) {
  return CoefficientDistribution(dist.kind, dist.scale * factor);
}

namespace {

// log(e^{-x} - e^{-y}) for 0 <= x <= y.
double log_exp_diff(double x, double y) {
  if (x == y) return -kInf;
  if (y == kInf) return -x;
  return -x + std::log(-std::expm1(x - y));
}

// Laplace mass of [a, b] with 0 <= a <= b, unit scale.
double log_laplace_mass_right(double a, double b) { return std::log(0.5) + log_exp_diff(a, b); }

}  // namespace

double log_law_mass(const CoefficientDistribution& dist, double a, double b) {
  const double s = dist.scale;
  if (!(a < b)) return -kInf;
  switch (dist.kind) {
    case CoefficientKind::gaussian:
      return log_normal_mass(a / s, b / s);
    case CoefficientKind::laplace: {
      const double x = a / s;
      const double y = b / s;
      if (x >= 0.0) return log_laplace_mass_right(x, y);
      if (y <= 0.0) return log_laplace_mass_right(-y, -x);
      return std::log1p(-0.5 * std::exp(x) - 0.5 * std::exp(-y));
    }
    case CoefficientKind::uniform: {
      const double lo = std::max(a, -s);
      const double hi = std::min(b, s);
      return lo < hi ? std::log((hi - lo) / (2.0 * s)) : -kInf;
    }
  }
  return -kInf;
}

double sample_truncated(const CoefficientDistribution& dist, double a, double b, Rng& rng) {
  const double s = dist.scale;
  if (!(a < b)) throw std::invalid_argument("sample_truncated: empty interval");
  switch (dist.kind) {
    case CoefficientKind::gaussian:
      return s * truncated_standard_normal(a / s, b / s, rng);
    case CoefficientKind::laplace: {
      double x = a / s;
      double y = b / s;
      bool flip = false;
      if (x < 0.0 && y > 0.0) {
        const double left = log_laplace_mass_right(0.0, -x);
        const double right = log_laplace_mass_right(0.0, y);
        flip = std::log(uniform01(rng)) < left - std::max(left, right) -
                                              std::log1p(std::exp(-std::abs(left - right)));
        if (flip) y = -x;
        x = 0.0;
      } else if (y <= 0.0) {
        flip = true;
        const double t = -y;
        y = -x;
        x = t;
      }
      // Exponential truncated to [x, y].
      const double u = uniform01(rng);
      double t = std::isfinite(y) ? x - std::log1p(u * std::expm1(x - y)) : x - std::log(u);
      t = std::clamp(t, x, y);
      return s * (flip ? -t : t);
    }
    case CoefficientKind::uniform: {
      const double lo = std::max(a, -s);
      const double hi = std::min(b, s);
      if (!(lo < hi)) throw std::invalid_argument("sample_truncated: interval outside the support");
      return lo + (hi - lo) * uniform01(rng);
    }
  }
  return 0.0;
}

}  // namespace bbayes
