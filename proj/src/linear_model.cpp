#include "bbayes/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbayes/errors.hpp"
#include "bbayes/line_conditional.hpp"

namespace bbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMargin = 1e-12;

Direction single(std::size_t i, std::vector<Segment> pattern, double mass) {
  return Direction{{{i, 1.0}}, std::move(pattern), mass};
}

}  // namespace

LinearModel LinearModel::haar(const CoefficientDistribution& dist, std::span<const double> amplitudes,
                              int grid_level) {
  if (amplitudes.empty()) throw std::invalid_argument("LinearModel::haar: no amplitudes");
  const int top = static_cast<int>(amplitudes.size()) - 2;
  if (top >= grid_level)
    throw std::invalid_argument("LinearModel::haar: detail level exceeds the grid");
  LinearModel model;
  model.kind_ = Kind::haar;
  model.grid_level_ = grid_level;
  model.top_level_ = top;
  const std::size_t m = model.bins();

  model.laws_.push_back(scaled(dist, amplitudes[0]));
  model.coordinate_.push_back(single(0, {{0, m, 1.0}}, 1.0));
  for (int j = 0; j <= top; ++j) {
    const std::size_t width = m >> j;
    const double amp = std::exp2(0.5 * j);
    for (std::size_t k = 0; k < (std::size_t{1} << j); ++k) {
      const std::size_t s = k * width;
      model.laws_.push_back(scaled(dist, amplitudes[static_cast<std::size_t>(j) + 1]));
      model.coordinate_.push_back(single(model.laws_.size() - 1,
                                         {{s, s + width / 2, amp}, {s + width / 2, s + width, -amp}},
                                         0.0));
    }
  }

  model.gibbs_ = model.coordinate_;
  // Indicators of dyadic blocks, expressed through the block's ancestors.
  for (int b = 1; b <= top + 1; ++b) {
    const std::size_t width = m >> b;
    const double size = std::exp2(-b);
    for (std::size_t k = 0; k < (std::size_t{1} << b); ++k) {
      Direction d;
      d.coords.emplace_back(0, size);
      for (int l = 0; l < b; ++l) {
        const std::size_t parent = k >> (b - l);
        const bool right = ((k >> (b - l - 1)) & 1u) != 0;
        const std::size_t index = (std::size_t{1} << l) + parent;
        d.coords.emplace_back(index, (right ? -1.0 : 1.0) * std::exp2(0.5 * l) * size);
      }
      d.pattern = {{k * width, (k + 1) * width, 1.0}};
      d.mass = size;
      model.gibbs_.push_back(std::move(d));
    }
  }
  return model;
}

LinearModel LinearModel::brownian(int grid_level) {
  if (grid_level < 1 || grid_level > GridFunction::kMaxLevel)
    throw std::invalid_argument("LinearModel::brownian: grid_level out of range");
  LinearModel model;
  model.kind_ = Kind::brownian;
  model.grid_level_ = grid_level;
  const std::size_t m = model.bins();
  const double md = static_cast<double>(m);

  model.laws_.emplace_back(CoefficientKind::gaussian, 1.0);
  model.coordinate_.push_back(single(0, {{0, m, 1.0}}, 1.0));
  for (std::size_t i = 0; i < m; ++i) {
    model.laws_.emplace_back(CoefficientKind::gaussian, 1.0 / std::sqrt(md));
    model.coordinate_.push_back(single(i + 1, {{i, m, 1.0}}, static_cast<double>(m - i) / md));
  }

  auto z = [](std::size_t bin) { return bin + 1; };
  model.gibbs_.push_back(model.coordinate_[0]);
  // Trades the start value against the first increment; leaves f unchanged.
  model.gibbs_.push_back(Direction{{{0, 1.0}, {z(0), -1.0}}, {}, 0.0});
  for (int b = 1; b <= grid_level; ++b) {
    const std::size_t width = m >> b;
    for (std::size_t s = 0; s < m; s += width) {
      const std::size_t e = s + width;
      Direction d;
      d.coords.emplace_back(z(s), 1.0);
      if (e < m) d.coords.emplace_back(z(e), -1.0);
      d.pattern = {{s, e, 1.0}};
      d.mass = static_cast<double>(width) / md;
      model.gibbs_.push_back(std::move(d));
    }
  }
  for (int j = 0; j < grid_level; ++j) {
    const std::size_t width = m >> j;
    for (std::size_t s = 0; s < m; s += width) {
      const std::size_t mid = s + width / 2;
      const std::size_t e = s + width;
      Direction d;
      d.coords.emplace_back(z(s), 1.0);
      d.coords.emplace_back(z(mid), -2.0);
      if (e < m) d.coords.emplace_back(z(e), 1.0);
      d.pattern = {{s, mid, 1.0}, {mid, e, -1.0}};
      model.gibbs_.push_back(std::move(d));
    }
  }
  return model;
}

void LinearModel::synthesize(std::span<const double> theta, std::vector<double>& values) const {
  const std::size_t m = bins();
  values.resize(m);
  if (kind_ == Kind::brownian) {
    double v = theta[0];
    for (std::size_t k = 0; k < m; ++k) {
      v += theta[k + 1];
      values[k] = v;
    }
    return;
  }
  // Coarse-to-fine in place: block values at level j + 1 from level j.
  values[0] = theta[0];
  std::size_t blocks = 1;
  for (int j = 0; j <= top_level_; ++j) {
    const double amp = std::exp2(0.5 * j);
    const std::size_t offset = std::size_t{1} << j;
    for (std::size_t k = blocks; k-- > 0;) {
      const double v = values[k];
      const double c = amp * theta[offset + k];
      values[2 * k] = v + c;
      values[2 * k + 1] = v - c;
    }
    blocks *= 2;
  }
  const std::size_t width = m / blocks;
  for (std::size_t k = blocks; k-- > 0;) {
    const double v = values[k];
    std::fill(values.begin() + static_cast<std::ptrdiff_t>(k * width),
              values.begin() + static_cast<std::ptrdiff_t>((k + 1) * width), v);
  }
}

GridFunction LinearModel::synthesize(std::span<const double> theta) const {
  std::vector<double> values;
  synthesize(theta, values);
  return GridFunction(grid_level_, std::move(values));
}

std::vector<double> LinearModel::sample_prior(Rng& rng) const {
  std::vector<double> theta(laws_.size());
  for (std::size_t i = 0; i < laws_.size(); ++i) theta[i] = laws_[i].sample(rng);
  return theta;
}

double LinearModel::log_prior(std::span<const double> theta) const {
  double s = 0.0;
  for (std::size_t i = 0; i < laws_.size(); ++i) s += log_density_at(laws_[i], theta[i]);
  return s;
}

ConstrainedChain::ConstrainedChain(const LinearModel& model, std::vector<double> upper, double n,
                                   Rng& rng)
    : model_(&model), upper_(std::move(upper)), n_(n) {
  if (upper_.size() != model.bins())
    throw std::invalid_argument("ConstrainedChain: envelope size does not match the model grid");
  for (double& u : upper_) u -= kMargin * (1.0 + std::abs(u));
  theta_ = model.sample_prior(rng);
  model.synthesize(theta_, values_);
  double excess = -kInf;
  for (std::size_t k = 0; k < values_.size(); ++k) excess = std::max(excess, values_[k] - upper_[k]);
  if (excess > 0.0) {
    theta_[0] -= excess + kMargin * (1.0 + std::abs(theta_[0]));
    if (!std::isfinite(log_density_at(model.law(0), theta_[0])))
      throw DegeneratePosteriorError(
          "no feasible starting point: the data lie below the prior's support");
    resync();
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (values_[k] > upper_[k]) theta_[0] -= values_[k] - upper_[k];
    resync();
  }
}

std::pair<double, double> ConstrainedChain::interval(const Direction& d) const {
  double lo = -kInf;
  double hi = kInf;
  for (const Segment& seg : d.pattern) {
    double slack = kInf;
    for (std::size_t k = seg.begin; k < seg.end; ++k) slack = std::min(slack, upper_[k] - values_[k]);
    slack = std::max(slack, 0.0);
    if (seg.coef > 0.0) hi = std::min(hi, slack / seg.coef);
    else if (seg.coef < 0.0) lo = std::max(lo, slack / seg.coef);
  }
  return {lo, hi};
}

void ConstrainedChain::apply(const Direction& d, double t) {
  if (t == 0.0) return;
  for (const auto& [i, u] : d.coords) theta_[i] += t * u;
  for (const Segment& seg : d.pattern)
    for (std::size_t k = seg.begin; k < seg.end; ++k) values_[k] += t * seg.coef;
}

void ConstrainedChain::resync() { model_->synthesize(theta_, values_); }

void ConstrainedChain::gibbs_sweep(Rng& rng) {
  std::vector<LineTerm> terms;
  for (const Direction& d : model_->gibbs_directions()) {
    const auto [lo, hi] = interval(d);
    terms.clear();
    for (const auto& [i, u] : d.coords) terms.push_back({model_->law(i), theta_[i], u});
    double t = 0.0;
    try {
      LineConditional line(terms, n_ * d.mass, lo, hi);
      t = line.sample(rng);
    } catch (const std::invalid_argument&) {
      // Improper or numerically empty conditional: keep the current state.
      continue;
    }
    apply(d, std::clamp(t, lo, hi));
  }
  resync();
}

std::size_t ConstrainedChain::random_walk_sweep(double step_scale, Rng& rng) {
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < model_->dimension(); ++i) {
    const CoefficientDistribution& law = model_->law(i);
    const double step = step_scale * std::sqrt(law.variance()) * standard_normal(rng);
    const Direction& d = model_->coordinate_direction(i);
    const auto [lo, hi] = interval(d);
    if (!(step >= lo && step <= hi)) continue;
    const double log_ratio = log_density_at(law, theta_[i] + step) - log_density_at(law, theta_[i]) +
                             n_ * d.mass * step;
    if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
      apply(d, step);
      ++accepted;
    }
  }
  resync();
  return accepted;
}

GridFunction ConstrainedChain::state() const { return GridFunction(model_->grid_level(), values_); }

}  // namespace bbayes
