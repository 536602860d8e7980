#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bbayes/errors.hpp"
#include "bbayes/harness.hpp"
#include "bbayes/model.hpp"
#include "helpers.hpp"

using namespace bbayes;

namespace {

KeyValueConfig config(const std::string& text) {
  std::istringstream is(text);
  return KeyValueConfig::parse(is);
}

RateStudyConfig small_rate_config() {
  RateStudyConfig c;
  c.prior = PriorSpec::wavelet(1.5, {}, 3, 5);
  c.f0.grid_level = 5;
  c.n_grid = {20, 50, 100, 200};
  c.replicates = 10;
  c.mcmc.steps = 100;
  c.ceiling_draws = 2000;
  c.seed = 77;
  return c;
}

bool same_cells(const std::vector<RateCell>& a, const std::vector<RateCell>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].error != b[i].error || a[i].points != b[i].points || a[i].excluded != b[i].excluded) return false;
  return true;
}

}  // namespace

TEST_CASE("line fits recover exact slopes") {
  std::vector<double> x{1, 2, 3, 5, 8}, y;
  for (double v : x) y.push_back(2.0 - 0.7 * v);
  LineFit f = fit_line(x, y);
  CHECK(std::abs(f.slope + 0.7) < 1e-8);
  CHECK(std::abs(f.intercept - 2.0) < 1e-8);
  std::vector<double> n{200, 500, 1000, 2000, 5000}, e;
  for (double v : n) e.push_back(3.0 * std::pow(v, -1.0 / 3.0));
  CHECK(std::abs(fit_loglog(n, e).slope + 1.0 / 3.0) < 1e-8);
  CHECK_THROWS(fit_line({1.0, 1.0}, {2.0, 3.0}));
  CHECK_THROWS(fit_line({1.0}, {2.0}));
}

TEST_CASE("theoretical exponents") {
  const CoefficientDistribution g{CoefficientKind::gaussian, 1.0}, l{CoefficientKind::laplace, 1.0};
  CHECK(*rate_exponent(PriorSpec::brownian(), 1.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(*rate_exponent(PriorSpec::brownian(), 0.25) == doctest::Approx(-0.25 / 1.75));
  CHECK(*rate_exponent(PriorSpec::wavelet(2.0, g, 6), 1.0) == doctest::Approx(-1.0 / 4.0));
  CHECK(*rate_exponent(PriorSpec::wavelet(1.0, g, 6), 2.0) == doctest::Approx(-1.0 / 2.0));
  CHECK(*rate_exponent(PriorSpec::wavelet(2.0, l, 6), 1.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(*rate_exponent(PriorSpec::truncated(g, 6), 1.0) == doctest::Approx(-0.5));
  CHECK_FALSE(rate_exponent(PriorSpec::finite({GridFunction::constant(2, 0.0)}), 1.0).has_value());

  CHECK(*small_ball_exponent(PriorSpec::wavelet(1.0, g, 6), 1.0) == doctest::Approx(1.0));
  CHECK(*small_ball_exponent(PriorSpec::wavelet(1.0, g, 6), 0.5) == doctest::Approx(4.0));
  CHECK(*small_ball_exponent(PriorSpec::wavelet(1.0, l, 6), 0.5) == doctest::Approx(3.0));
  CHECK(*small_ball_exponent(PriorSpec::wavelet(2.0, g, 6), 1.0) == doctest::Approx(3.0));
  CHECK(*small_ball_exponent(PriorSpec::truncated(g, 6), 0.5) == doctest::Approx(2.0));
  CHECK(*small_ball_exponent(PriorSpec::brownian(), 1.0) == 2.0);

  CHECK(outside_rate_hypothesis(PriorSpec::wavelet(1.0, g, 6)));
  CHECK_FALSE(outside_rate_hypothesis(PriorSpec::wavelet(1.5, g, 6)));
  CHECK_FALSE(outside_rate_hypothesis(PriorSpec::brownian()));
}

TEST_CASE("error metrics") {
  GridFunction f0 = GridFunction(1, {1.0, 0.0});
  GridFunction f = GridFunction(1, {0.0, 1.0});
  CHECK(error_of(ErrorMetric::l1, f, f0) == doctest::Approx(1.0));
  CHECK(error_of(ErrorMetric::lower_part, f, f0) == doctest::Approx(0.5));
  CHECK(error_of(ErrorMetric::upper_part, f, f0) == doctest::Approx(0.5));
  for (ErrorMetric m : {ErrorMetric::l1, ErrorMetric::lower_part, ErrorMetric::upper_part})
    CHECK(parse_error_metric(to_string(m)) == m);
  CHECK(parse_sampler_kind("importance") == SamplerKind::importance);
  CHECK_THROWS(parse_error_metric("l2"));
  CHECK_THROWS(parse_sampler_kind("gibbs"));
}

TEST_CASE("ceiling calibration") {
  Rng rng(1);
  GridFunction f0 = GridFunction::constant(2, 1.0);
  PriorSpec low = PriorSpec::finite({GridFunction::constant(2, 0.2)});
  CHECK(calibrate_ceiling(low, f0, 1e-3, 100, rng) == doctest::Approx(1.0));
  PriorSpec high = PriorSpec::finite({GridFunction::constant(2, 0.2), GridFunction::constant(2, 2.5)});
  CHECK(calibrate_ceiling(high, f0, 1e-3, 2000, rng) == doctest::Approx(2.5));

  // Gaussian constant-level prior: max X = theta, so Delta is the normal quantile shifted by max f0.
  PriorSpec constant_level = PriorSpec::truncated({}, 0, 1);
  const double c = calibrate_ceiling(constant_level, GridFunction::constant(1, 0.0), 0.05, 40000, rng);
  CHECK(c > 0.0);
  std::size_t above = 0;
  for (int i = 0; i < 40000; ++i) above += sample_prior(constant_level, rng).max() > c ? 1 : 0;
  CHECK(std::abs(above / 40000.0 - 0.05) < 0.006);
}

TEST_CASE("rate study: deterministic and independent of threads") {
  RateStudyConfig c = small_rate_config();
  RateStudyReport a = run_rate_study(c);
  c.threads = 3;
  RateStudyReport b = run_rate_study(c);
  CHECK(same_cells(a.cells, b.cells));
  CHECK(a.fitted_slope == b.fitted_slope);
  CHECK(a.ceiling == b.ceiling);
  REQUIRE(a.points.size() == 4);
  CHECK(a.theory.has_value());
  CHECK(a.margin == doctest::Approx(std::abs(a.fitted_slope - *a.theory)));

  // A single cell recomputed on its own matches the batch.
  RateCell cell = run_rate_cell(c, c.f0.build(), a.ceiling, 2, 1);
  CHECK(cell.error == a.cells[2 * c.replicates + 1].error);
  CHECK(cell.points == a.cells[2 * c.replicates + 1].points);

  c.seed = 78;
  CHECK_FALSE(same_cells(run_rate_study(c).cells, a.cells));
}

TEST_CASE("rate study: degenerate importance sampling excludes cells") {
  RateStudyConfig c = small_rate_config();
  c.sampler = SamplerKind::importance;
  c.importance_draws = 1;
  c.n_grid = {500, 1000, 2000, 4000};
  RateStudyReport r = run_rate_study(c);
  CHECK(r.excluded > 0);
  CHECK(r.too_many_exclusions);
  CHECK_FALSE(r.pass);
  for (const auto& cell : r.cells)
    if (cell.excluded) CHECK_FALSE(cell.note.empty());
}

TEST_CASE("rate study configuration") {
  KeyValueConfig cfg = config(
      "seed = 5\nn_grid = 10, 20, 40, 80\nreplicates = 12\nsampler = importance\ndraws = 50\n"
      "prior.kind = brownian_start\nprior.grid_level = 4\nf0.grid_level = 4\nf0.kind = hat\n");
  RateStudyConfig c = parse_rate_study(cfg);
  CHECK(c.seed == 5);
  CHECK(c.n_grid == std::vector<double>{10, 20, 40, 80});
  CHECK(c.importance_draws == 50);
  CHECK(c.f0.kind == TestFunctionKind::hat);
  CHECK(c.prior.name() == "brownian_start");
  CHECK_THROWS_AS(parse_rate_study(config("unknown_key = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_rate_study(config("n_grid = 20, 10, 30, 40\n")), ConfigError);
  CHECK_THROWS_AS(parse_rate_study(config("replicates = 5\n")), ConfigError);
  CHECK_THROWS_AS(parse_rate_study(config("f0.grid_level = 6\n")), ConfigError);

  McmcOptions o = parse_mcmc_options(config("steps = 10\nkernel = random_walk\nstep_scale = 0.25\n"));
  CHECK(o.steps == 10);
  CHECK(o.kernel == McmcKernel::random_walk);
  CHECK(o.step_scale == 0.25);
  CHECK_THROWS(parse_mcmc_options(config("kernel = hmc\n")));

  DecayStudyConfig d = parse_decay_study(config("r = 0.3\nprior.kind = truncated_wavelet\nprior.j_cap = 3\n"));
  CHECK(d.r == 0.3);
  CHECK_THROWS_AS(parse_decay_study(config("error_metric = l1\n")), ConfigError);
}

TEST_CASE("lemma constant calibration inverts the bound") {
  const CoefficientDistribution g{CoefficientKind::gaussian, 1.0};
  for (double beta : {0.5, 1.0}) {
    for (double log_p : {-3.0, -20.0}) {
      auto D = calibrate_lemma_constant(g, 1.0, beta, 0.3, log_p);
      REQUIRE(D.has_value());
      CHECK(small_ball_lower_bound_log(g, 1.0, beta, *D, 0.3) == doctest::Approx(log_p).epsilon(1e-8));
    }
  }
  // The bound is D eps^{-1/(alpha ^ beta)} log density(D eps^{-(alpha-beta)_+/beta}).
  const double D = 0.7, eps = 0.2, alpha = 2.0, beta = 1.0;
  const double t = D * std::pow(eps, -(alpha - beta) / beta);
  const double expected = D * std::pow(eps, -1.0) * std::log(testutil::std_normal_pdf(t));
  CHECK(small_ball_lower_bound_log(g, alpha, beta, D, eps) == doctest::Approx(expected));
}

TEST_CASE("small-ball study") {
  Rng rng(2);
  PriorSpec prior = PriorSpec::wavelet(1.0, {}, 4, 5);
  SmallBallStudyOptions o;
  o.particles = 300;
  o.runs = 8;
  SmallBallReport r = run_small_ball_study(prior, GridFunction::constant(5, 0.0), {1.0, 0.7, 0.5}, o, rng);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.monotone);
  CHECK(r.lemma_D.has_value());
  CHECK(r.theory.has_value());
  CHECK(std::isfinite(r.fitted_exponent));
  for (std::size_t i = 1; i < 3; ++i) CHECK(r.rows[i].probability < r.rows[i - 1].probability);

  PriorSpec fin = PriorSpec::finite({GridFunction::constant(2, 0.0), GridFunction::constant(2, 0.6)});
  SmallBallReport f = run_small_ball_study(fin, GridFunction::constant(2, 0.5), {1.0, 0.5, 0.2, 0.05}, o, rng);
  CHECK(f.rows[2].probability == doctest::Approx(0.5));
  CHECK(f.rows[3].excluded);
  CHECK_FALSE(f.lemma_D.has_value());
  CHECK_THROWS(run_small_ball_study(prior, GridFunction::constant(5, 0.0), {0.5, 0.7}, o, rng));
  CHECK_THROWS(run_small_ball_study(prior, GridFunction::constant(5, 0.0), {0.5, -0.1}, o, rng));
}

TEST_CASE("decay study: far radius has no mass and small n follows the prior") {
  DecayStudyConfig c;
  c.prior = PriorSpec::truncated({}, 3, 5);
  c.f0.grid_level = 5;
  c.replicates = 6;
  c.mcmc.steps = 100;
  c.ceiling_draws = 2000;
  c.n_grid = {20, 50};
  c.r = 50.0;
  DecayStudyReport far = run_posterior_decay_study(c);
  for (const auto& p : far.points) CHECK(p.mean_mass == 0.0);
  CHECK(far.monotone);

  c.sampler = SamplerKind::importance;
  c.importance_draws = 4000;
  c.n_grid = {1e-3, 2e-3};
  c.r = 0.3;
  DecayStudyReport tiny = run_posterior_decay_study(c);
  Rng rng(3);
  const GridFunction f0 = c.f0.build();
  std::vector<double> hits;
  for (int i = 0; i < 20000; ++i)
    hits.push_back(positive_part_integral(f0, sample_prior(c.prior, rng)) >= c.r ? 1.0 : 0.0);
  const auto prior_mass = testutil::mean_se(hits);
  REQUIRE(tiny.points.size() == 2);
  // The ceiling trims at most ceiling_tail of prior mass.
  CHECK(std::abs(tiny.points[0].mean_mass - prior_mass.mean) <=
        3.0 * std::hypot(prior_mass.se, tiny.points[0].se) + c.ceiling_tail + 0.01);
}
