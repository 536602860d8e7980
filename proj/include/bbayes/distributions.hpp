#pragma once

#include <optional>
#include <string>

#include "bbayes/random.hpp"

namespace bbayes {

// Standard normal helpers that stay accurate deep in the tails.
double normal_cdf(double z);
/// log(1 - Phi(z)), accurate for z up to ~1e150.
double log_normal_sf(double z);
/// log Phi(z).
double log_normal_cdf(double z);
/// log(Phi(b) - Phi(a)) for a < b; -inf when a >= b.
double log_normal_mass(double a, double b);

/// Standard normal conditioned on [a, b]; either end may be infinite.
double truncated_standard_normal(double a, double b, Rng& rng);

enum class CoefficientKind { gaussian, laplace, uniform };

std::string to_string(CoefficientKind kind);
CoefficientKind parse_coefficient_kind(const std::string& s);

/// Law of the i.i.d. wavelet weights.
///
/// `scale` is the standard deviation (gaussian), the mean absolute value
/// (laplace, i.e. the inverse rate) or the half-width (uniform). All three
/// are symmetric and unimodal about zero.
struct CoefficientDistribution {
  CoefficientKind kind = CoefficientKind::gaussian;
  double scale = 1.0;

  CoefficientDistribution() = default;
  CoefficientDistribution(CoefficientKind k, double s);

  /// Largest gamma with density(x) <= exp(-gamma |x|) / gamma for all x.
  /// Present for gaussian and laplace.
  std::optional<double> tail_rate() const;

  double sample(Rng& rng) const;
  double variance() const;
  double cdf(double x) const;

  bool operator==(const CoefficientDistribution&) const = default;
};

double density_at(const CoefficientDistribution& dist, double x);
double log_density_at(const CoefficientDistribution& dist, double x);

/// log P(a <= xi <= b), accurate in the tails; -inf when a >= b.
double log_law_mass(const CoefficientDistribution& dist, double a, double b);

/// xi conditioned on [a, b]; throws when the interval carries no mass.
double sample_truncated(const CoefficientDistribution& dist, double a, double b, Rng& rng);

/// The same law rescaled by a positive factor.
CoefficientDistribution scaled(const CoefficientDistribution& dist, double factor);

}  // namespace bbayes
