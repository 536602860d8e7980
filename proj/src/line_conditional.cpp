#include "bbayes/line_conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bbayes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}
}  // namespace

LineConditional::LineConditional(std::span<const LineTerm> terms, double tilt, double lo, double hi)
    : lo_(lo), hi_(hi), log_normalizer_(-kInf) {
  // Support restrictions from uniform laws.
  for (const LineTerm& term : terms) {
    if (term.law.kind != CoefficientKind::uniform || term.direction == 0.0) continue;
    const double s = term.law.scale;
    double a = (-s - term.value) / term.direction;
    double b = (s - term.value) / term.direction;
    if (a > b) std::swap(a, b);
    lo_ = std::max(lo_, a);
    hi_ = std::min(hi_, b);
  }
  if (std::isnan(lo_) || std::isnan(hi_)) throw std::invalid_argument("LineConditional: NaN bound");
  if (lo_ > hi_) throw std::invalid_argument("LineConditional: empty support");
  if (lo_ == hi_) return;

  std::vector<double> cuts{lo_, hi_};
  for (const LineTerm& term : terms) {
    if (term.law.kind != CoefficientKind::laplace || term.direction == 0.0) continue;
    const double t0 = -term.value / term.direction;
    if (t0 > lo_ && t0 < hi_) cuts.push_back(t0);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece p{cuts[i], cuts[i + 1], 0.0, tilt, 0.0, 0.0};
    double probe;
    if (std::isfinite(p.lo) && std::isfinite(p.hi)) probe = 0.5 * (p.lo + p.hi);
    else if (std::isfinite(p.lo)) probe = p.lo + 1.0;
    else if (std::isfinite(p.hi)) probe = p.hi - 1.0;
    else probe = 0.0;
    for (const LineTerm& term : terms) {
      const double s = term.law.scale;
      const double v = term.value;
      const double d = term.direction;
      switch (term.law.kind) {
        case CoefficientKind::gaussian:
          p.quad += d * d / (2.0 * s * s);
          p.lin += -v * d / (s * s);
          p.offset += -v * v / (2.0 * s * s) - std::log(s) - kLogSqrt2Pi;
          break;
        case CoefficientKind::laplace: {
          const double sign = (v + probe * d) >= 0.0 ? 1.0 : -1.0;
          p.lin += -sign * d / s;
          p.offset += -sign * v / s - std::log(2.0 * s);
          break;
        }
        case CoefficientKind::uniform:
          p.offset += -std::log(2.0 * s);
          break;
      }
    }
    p.log_mass = piece_log_mass(p);
    pieces_.push_back(p);
    log_normalizer_ = log_sum_exp(log_normalizer_, p.log_mass);
  }
  if (!(log_normalizer_ > -kInf))
    throw std::invalid_argument("LineConditional: support carries no mass");
}

double LineConditional::piece_log_mass(const Piece& p) {
  if (p.quad > 0.0) {
    const double mu = p.lin / (2.0 * p.quad);
    const double sigma = 1.0 / std::sqrt(2.0 * p.quad);
    return p.offset + p.lin * p.lin / (4.0 * p.quad) + std::log(sigma) + kLogSqrt2Pi +
           log_normal_mass((p.lo - mu) / sigma, (p.hi - mu) / sigma);
  }
  const double width = p.hi - p.lo;
  if (p.lin > 0.0) {
    if (!std::isfinite(p.hi)) throw std::invalid_argument("LineConditional: improper density");
    return p.offset + p.lin * p.hi + std::log(-std::expm1(-p.lin * width)) - std::log(p.lin);
  }
  if (p.lin < 0.0) {
    if (!std::isfinite(p.lo)) throw std::invalid_argument("LineConditional: improper density");
    return p.offset + p.lin * p.lo + std::log(-std::expm1(p.lin * width)) - std::log(-p.lin);
  }
  if (!std::isfinite(width)) throw std::invalid_argument("LineConditional: improper density");
  return p.offset + std::log(width);
}

double LineConditional::sample_piece(const Piece& p, Rng& rng) {
  double t;
  if (p.quad > 0.0) {
    const double mu = p.lin / (2.0 * p.quad);
    const double sigma = 1.0 / std::sqrt(2.0 * p.quad);
    t = mu + sigma * truncated_standard_normal((p.lo - mu) / sigma, (p.hi - mu) / sigma, rng);
  } else if (p.lin > 0.0) {
    // Mass concentrated at the upper end.
    const double width = p.hi - p.lo;
    const double u = uniform01(rng);
    t = p.hi + std::log1p(u * std::expm1(-p.lin * width)) / p.lin;
  } else if (p.lin < 0.0) {
    const double width = p.hi - p.lo;
    const double u = uniform01(rng);
    t = p.lo + std::log1p(u * std::expm1(p.lin * width)) / p.lin;
  } else {
    t = p.lo + (p.hi - p.lo) * uniform01(rng);
  }
  return std::clamp(t, p.lo, p.hi);
}

double LineConditional::sample(Rng& rng) const {
  if (pieces_.empty()) return lo_;
  if (pieces_.size() == 1) return sample_piece(pieces_.front(), rng);
  const double u = uniform01(rng);
  double acc = 0.0;
  for (const Piece& p : pieces_) {
    acc += std::exp(p.log_mass - log_normalizer_);
    if (u <= acc) return sample_piece(p, rng);
  }
  return sample_piece(pieces_.back(), rng);
}

double LineConditional::log_density(double t) const {
  if (!(t >= lo_ && t <= hi_)) return -kInf;
  for (const Piece& p : pieces_) {
    if (t >= p.lo && t <= p.hi)
      return -p.quad * t * t + p.lin * t + p.offset - log_normalizer_;
  }
  return -kInf;
}

}  // namespace bbayes
