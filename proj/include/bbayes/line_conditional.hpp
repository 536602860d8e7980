#pragma once

#include <span>
#include <vector>

#include "bbayes/distributions.hpp"
#include "bbayes/random.hpp"

namespace bbayes {

/// One independent coordinate moving along a line: value + t * direction.
struct LineTerm {
  CoefficientDistribution law;
  double value;
  double direction;
};

/// The density on t in [lo, hi] proportional to
///   prod_i law_i(value_i + t * direction_i) * exp(tilt * t).
///
/// Gaussian terms contribute a quadratic, laplace terms a kinked linear
/// function and uniform terms a support restriction, so the log-density is
/// piecewise quadratic. Pieces are integrated in closed form and sampled
/// exactly; nothing here is approximate beyond floating point.
class LineConditional {
 public:
  LineConditional(std::span<const LineTerm> terms, double tilt, double lo, double hi);

  double sample(Rng& rng) const;

  /// log of the integral of the unnormalised density.
  double log_normalizer() const { return log_normalizer_; }

  /// Normalised log-density at t (-inf outside the support).
  double log_density(double t) const;

  double lower() const { return lo_; }
  double upper() const { return hi_; }

 private:
  struct Piece {
    double lo, hi;
    double quad;  // log-density = -quad t^2 + lin t + offset
    double lin;
    double offset;
    double log_mass;
  };

  static double piece_log_mass(const Piece& p);
  static double sample_piece(const Piece& p, Rng& rng);

  double lo_;
  double hi_;
  std::vector<Piece> pieces_;
  double log_normalizer_;
};

}  // namespace bbayes
