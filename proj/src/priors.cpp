#include "bbayes/priors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "bbayes/errors.hpp"

namespace bbayes {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_detail_level(int j, int grid_level, const char* what) {
  if (j < -1 || j >= grid_level)
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(j) +
                                " must lie in [-1, grid_level - 1]");
}

}  // namespace

double detail_amplitude(double alpha, int j) { return std::exp2(-0.5 * j * (2.0 * alpha + 1.0)); }

std::vector<double> truncation_level_law(int j_cap) {
  if (j_cap < 0) throw std::invalid_argument("truncation_level_law: j_cap must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(j_cap) + 1);
  for (int j = 0; j <= j_cap; ++j) p[static_cast<std::size_t>(j)] = std::exp2(-j);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

void PriorSpec::validate() const {
  if (grid_level < 1 || grid_level > GridFunction::kMaxLevel)
    throw std::invalid_argument("prior grid_level out of range");
  std::visit(Overloaded{
                 [](const BrownianStart&) {},
                 [&](const WaveletSeries& w) {
                   if (!(w.alpha > 0.0)) throw std::invalid_argument("wavelet prior: alpha must be > 0");
                   check_detail_level(w.j_max, grid_level, "j_max");
                 },
                 [&](const TruncatedWavelet& t) {
                   if (t.j_cap < 0) throw std::invalid_argument("truncated prior: j_cap must be >= 0");
                   check_detail_level(t.j_cap, grid_level, "j_cap");
                 },
                 [&](const FiniteSupport& f) {
                   if (f.atoms.empty()) throw std::invalid_argument("finite prior: no atoms");
                   if (!f.weights.empty() && f.weights.size() != f.atoms.size())
                     throw std::invalid_argument("finite prior: weights/atoms size mismatch");
                   for (double w : f.weights)
                     if (!(w >= 0.0)) throw std::invalid_argument("finite prior: negative weight");
                 },
             },
             variant);
}

std::string PriorSpec::name() const {
  return std::visit(Overloaded{
                        [](const BrownianStart&) { return std::string("brownian_start"); },
                        [](const WaveletSeries& w) {
                          return "wavelet_series(" + to_string(w.dist.kind) + ")";
                        },
                        [](const TruncatedWavelet& t) {
                          return "truncated_wavelet(" + to_string(t.dist.kind) + ")";
                        },
                        [](const FiniteSupport&) { return std::string("finite_support"); },
                    },
                    variant);
}

PriorSpec PriorSpec::brownian(int grid_level) {
  PriorSpec p{BrownianStart{}, grid_level};
  p.validate();
  return p;
}

PriorSpec PriorSpec::wavelet(double alpha, CoefficientDistribution dist, int j_max, int grid_level) {
  PriorSpec p{WaveletSeries{alpha, dist, j_max}, grid_level};
  p.validate();
  return p;
}

PriorSpec PriorSpec::truncated(CoefficientDistribution dist, int j_cap, int grid_level) {
  PriorSpec p{TruncatedWavelet{dist, j_cap}, grid_level};
  p.validate();
  return p;
}

PriorSpec PriorSpec::finite(std::vector<GridFunction> atoms, std::vector<double> weights) {
  if (atoms.empty()) throw std::invalid_argument("finite prior: no atoms");
  if (weights.empty()) weights.assign(atoms.size(), 1.0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("finite prior: weights sum to zero");
  for (double& w : weights) w /= total;
  int level = 0;
  for (const auto& a : atoms) level = std::max(level, a.level());
  for (auto& a : atoms) a = a.refined(level);
  PriorSpec p{FiniteSupport{std::move(atoms), std::move(weights)}, level};
  p.validate();
  return p;
}

GridFunction sample_brownian_prior(int grid_level, Rng& rng) {
  if (grid_level < 1) throw std::invalid_argument("sample_brownian_prior: grid_level must be >= 1");
  const std::size_t m = std::size_t{1} << grid_level;
  const double step_sd = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> values(m);
  double v = standard_normal(rng);
  for (std::size_t k = 0; k < m; ++k) {
    v += step_sd * standard_normal(rng);
    values[k] = v;
  }
  return GridFunction(grid_level, std::move(values));
}

WaveletCoefficients sample_wavelet_coefficients(const WaveletSeries& spec, Rng& rng) {
  WaveletCoefficients c = WaveletCoefficients::zeros(spec.j_max);
  c.scaling = spec.dist.sample(rng);
  for (int j = 0; j <= spec.j_max; ++j) {
    const double d = detail_amplitude(spec.alpha, j);
    for (double& v : c.detail[static_cast<std::size_t>(j)]) v = d * spec.dist.sample(rng);
  }
  return c;
}

GridFunction sample_wavelet_prior(const PriorSpec& spec, Rng& rng) {
  const auto* w = std::get_if<WaveletSeries>(&spec.variant);
  if (!w) throw std::invalid_argument("sample_wavelet_prior: not a wavelet_series prior");
  return haar_synthesis(sample_wavelet_coefficients(*w, rng), spec.grid_level);
}

std::pair<int, GridFunction> sample_truncated_prior(const PriorSpec& spec, Rng& rng) {
  const auto* t = std::get_if<TruncatedWavelet>(&spec.variant);
  if (!t) throw std::invalid_argument("sample_truncated_prior: not a truncated_wavelet prior");
  const auto law = truncation_level_law(t->j_cap);
  const double u = uniform01(rng);
  int level = t->j_cap;
  double acc = 0.0;
  for (int j = 0; j <= t->j_cap; ++j) {
    acc += law[static_cast<std::size_t>(j)];
    if (u <= acc) {
      level = j;
      break;
    }
  }
  WaveletCoefficients c = WaveletCoefficients::zeros(level);
  c.scaling = t->dist.sample(rng);
  for (auto& lv : c.detail)
    for (double& v : lv) v = t->dist.sample(rng);
  return {level, haar_synthesis(c, spec.grid_level)};
}

std::size_t sample_finite_prior(const FiniteSupport& spec, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
    acc += spec.weights.empty() ? 1.0 / static_cast<double>(spec.atoms.size()) : spec.weights[i];
    if (u <= acc) return i;
  }
  return spec.atoms.size() - 1;
}

GridFunction sample_prior(const PriorSpec& spec, Rng& rng) {
  return std::visit(
      Overloaded{
          [&](const BrownianStart&) { return sample_brownian_prior(spec.grid_level, rng); },
          [&](const WaveletSeries&) { return sample_wavelet_prior(spec, rng); },
          [&](const TruncatedWavelet&) { return sample_truncated_prior(spec, rng).second; },
          [&](const FiniteSupport& f) { return f.atoms[sample_finite_prior(f, rng)]; },
      },
      spec.variant);
}

std::string to_string(TestFunctionKind kind) {
  switch (kind) {
    case TestFunctionKind::cusp: return "cusp";
    case TestFunctionKind::hat: return "hat";
    case TestFunctionKind::smooth: return "smooth";
  }
  return "?";
}

TestFunctionKind parse_test_function_kind(const std::string& s) {
  if (s == "cusp") return TestFunctionKind::cusp;
  if (s == "hat") return TestFunctionKind::hat;
  if (s == "smooth") return TestFunctionKind::smooth;
  throw std::invalid_argument("unknown test function kind '" + s + "'");
}

GridFunction holder_test_function(double beta, double R, TestFunctionKind kind, int grid_level) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("holder_test_function: beta must lie in (0, 1]");
  if (!(R >= 0.0)) throw std::invalid_argument("holder_test_function: R must be nonnegative");
  if (kind == TestFunctionKind::smooth && beta != 1.0)
    throw std::invalid_argument("holder_test_function: smooth kind requires beta = 1");
  const std::size_t m = std::size_t{1} << grid_level;
  std::vector<double> values(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
    switch (kind) {
      case TestFunctionKind::cusp:
        values[k] = R * std::pow(std::abs(x - 0.5), beta);
        break;
      case TestFunctionKind::hat:
        values[k] = R * std::exp2(-beta) * std::pow(std::max(1.0 - 2.0 * std::abs(x - 0.5), 0.0), beta);
        break;
      case TestFunctionKind::smooth:
        values[k] = R / (2.0 * std::numbers::pi) * std::sin(2.0 * std::numbers::pi * x);
        break;
    }
  }
  return GridFunction(grid_level, std::move(values));
}

PriorSpec parse_prior(const KeyValueConfig& cfg) {
  cfg.require_known({"kind", "dist", "scale", "alpha", "j_max", "j_cap", "grid_level", "atoms", "weights"});
  const std::string kind = cfg.get_string("kind");
  const int grid_level = static_cast<int>(cfg.get_int("grid_level", 8));
  auto dist = [&] {
    return CoefficientDistribution(parse_coefficient_kind(cfg.get_string("dist", "gaussian")),
                                   cfg.get_double("scale", 1.0));
  };
  try {
    if (kind == "brownian_start") return PriorSpec::brownian(grid_level);
    if (kind == "wavelet_series")
      return PriorSpec::wavelet(cfg.get_double("alpha"), dist(),
                                static_cast<int>(cfg.get_int("j_max", grid_level - 1)), grid_level);
    if (kind == "truncated_wavelet")
      return PriorSpec::truncated(dist(), static_cast<int>(cfg.get_int("j_cap", 6)), grid_level);
    if (kind == "finite") {
      // Atoms file paths are relative to the config file.
      std::filesystem::path atoms = cfg.get_string("atoms");
      if (atoms.is_relative()) atoms = std::filesystem::path(cfg.origin()).parent_path() / atoms;
      std::ifstream is(atoms);
      if (!is) throw ConfigError(cfg.origin() + ": cannot open atoms file " + atoms.string());
      std::vector<double> weights;
      if (cfg.has("weights")) weights = cfg.get_doubles("weights");
      return PriorSpec::finite(read_grid_function_list(is), std::move(weights));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }
  throw ConfigError(cfg.origin() + ": unknown prior kind '" + kind + "'");
}

}  // namespace bbayes
