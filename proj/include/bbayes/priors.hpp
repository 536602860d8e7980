#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bbayes/config.hpp"
#include "bbayes/distributions.hpp"
#include "bbayes/grid_function.hpp"
#include "bbayes/haar.hpp"
#include "bbayes/random.hpp"

namespace bbayes {

/// X_0 + W_t with X_0 standard normal and W a standard Brownian motion.
struct BrownianStart {
  bool operator==(const BrownianStart&) const = default;
};

/// Haar series with detail amplitudes 2^{-(j/2)(2 alpha + 1)} up to level j_max.
/// The father coefficient has amplitude 1 and the same weight law.
struct WaveletSeries {
  double alpha = 1.0;
  CoefficientDistribution dist;
  int j_max = 7;
  bool operator==(const WaveletSeries&) const = default;
};

/// Random truncation level J with P(J = j) proportional to 2^{-j} on
/// {0, ..., j_cap}; unit amplitudes up to J.
struct TruncatedWavelet {
  CoefficientDistribution dist;
  int j_cap = 6;
  bool operator==(const TruncatedWavelet&) const = default;
};

/// A prior with finitely many atoms.
struct FiniteSupport {
  std::vector<GridFunction> atoms;
  std::vector<double> weights;  // normalised on validation
  bool operator==(const FiniteSupport&) const = default;
};

using PriorVariant = std::variant<BrownianStart, WaveletSeries, TruncatedWavelet, FiniteSupport>;

struct PriorSpec {
  PriorVariant variant;
  int grid_level = 8;

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
  std::string name() const;

  static PriorSpec brownian(int grid_level = 8);
  static PriorSpec wavelet(double alpha, CoefficientDistribution dist, int j_max, int grid_level = 8);
  static PriorSpec truncated(CoefficientDistribution dist, int j_cap, int grid_level = 8);
  static PriorSpec finite(std::vector<GridFunction> atoms, std::vector<double> weights = {});

  bool operator==(const PriorSpec&) const = default;
};

/// 2^{-(j/2)(2 alpha + 1)}.
double detail_amplitude(double alpha, int j);

/// P(J = j) for j = 0..j_cap, proportional to 2^{-j}.
std::vector<double> truncation_level_law(int j_cap);

GridFunction sample_brownian_prior(int grid_level, Rng& rng);
WaveletCoefficients sample_wavelet_coefficients(const WaveletSeries& spec, Rng& rng);
GridFunction sample_wavelet_prior(const PriorSpec& spec, Rng& rng);
std::pair<int, GridFunction> sample_truncated_prior(const PriorSpec& spec, Rng& rng);
std::size_t sample_finite_prior(const FiniteSupport& spec, Rng& rng);

/// Draw from any prior family.
GridFunction sample_prior(const PriorSpec& spec, Rng& rng);

enum class TestFunctionKind { cusp, hat, smooth };

std::string to_string(TestFunctionKind kind);
TestFunctionKind parse_test_function_kind(const std::string& s);

/// A function in the Hoelder ball C^beta(R), sampled at bin midpoints.
/// R = 0 gives the zero function.
///   cusp:   R |x - 1/2|^beta
///   hat:    (R / 2^beta) (1 - 2|x - 1/2|)_+^beta
///   smooth: (R / 2 pi) sin(2 pi x), only for beta = 1
GridFunction holder_test_function(double beta, double R, TestFunctionKind kind, int grid_level);

/// Builds a prior from keys such as
///   kind = wavelet_series | truncated_wavelet | brownian_start
///   dist = gaussian | laplace | uniform, scale = <s>
///   alpha = <a>, j_max = <j>, j_cap = <j>, grid_level = <L>
/// or kind = finite with atoms = <GridFunction CSV list> (relative to the
/// config file) and optional weights = w1, w2, ...
PriorSpec parse_prior(const KeyValueConfig& cfg);

}  // namespace bbayes
