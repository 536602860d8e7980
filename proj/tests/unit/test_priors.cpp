#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bbayes/errors.hpp"
#include "bbayes/model.hpp"
#include "bbayes/priors.hpp"
#include "bbayes/small_ball.hpp"
#include "helpers.hpp"

using namespace bbayes;

TEST_CASE("detail amplitudes and the truncation law") {
  CHECK(detail_amplitude(1.0, 0) == 1.0);
  CHECK(detail_amplitude(1.0, 2) == doctest::Approx(std::pow(2.0, -3.0)));
  CHECK(detail_amplitude(0.5, 3) == doctest::Approx(std::pow(2.0, -3.0)));
  const auto law = truncation_level_law(6);
  REQUIRE(law.size() == 7);
  double total = 0.0;
  for (double p : law) total += p;
  CHECK(total == doctest::Approx(1.0));
  for (std::size_t j = 1; j < law.size(); ++j) CHECK(law[j] / law[j - 1] == doctest::Approx(0.5));
}

TEST_CASE("prior validation") {
  CHECK_THROWS(PriorSpec::wavelet(0.0, {}, 3));
  CHECK_THROWS(PriorSpec::wavelet(1.0, {}, 8, 8));  // finest detail level must sit below the grid
  CHECK_NOTHROW(PriorSpec::wavelet(1.0, {}, 7, 8));
  CHECK_THROWS(PriorSpec::truncated({}, -1));
  CHECK_THROWS(PriorSpec::brownian(0));
  CHECK_THROWS(PriorSpec::finite({}));
  CHECK_THROWS(PriorSpec::finite({GridFunction::constant(2, 0.0)}, {1.0, 2.0}));
}

TEST_CASE("finite priors normalise weights and share a grid level") {
  PriorSpec p = PriorSpec::finite({GridFunction::constant(1, 0.0), GridFunction::constant(3, 1.0)}, {1.0, 3.0});
  const auto& fs = std::get<FiniteSupport>(p.variant);
  CHECK(fs.weights[0] == doctest::Approx(0.25));
  CHECK(fs.atoms[0].level() == fs.atoms[1].level());
  Rng rng(1);
  int ones = 0;
  for (int i = 0; i < 20000; ++i) ones += sample_finite_prior(fs, rng) == 1 ? 1 : 0;
  const double se = std::sqrt(0.75 * 0.25 / 20000);
  CHECK(std::abs(ones / 20000.0 - 0.75) < 3.0 * se);
}

TEST_CASE("Brownian prior: first bin variance and increments") {
  const int level = 4;
  const double m = 16.0;
  Rng rng(2);
  std::vector<double> first, inc, inc_sq;
  for (int i = 0; i < 10000; ++i) {
    GridFunction f = sample_brownian_prior(level, rng);
    first.push_back(f[0] * f[0]);
    for (std::size_t k = 1; k < f.size(); ++k) {
      inc.push_back(f[k] - f[k - 1]);
      inc_sq.push_back(inc.back() * inc.back());
    }
  }
  const double var0 = testutil::mean_se(first).mean;
  CHECK(std::abs(var0 - (1.0 + 1.0 / m)) < 0.05 * (1.0 + 1.0 / m));
  const auto mi = testutil::mean_se(inc);
  CHECK(std::abs(mi.mean) < 3.5 * mi.se);
  const auto vi = testutil::mean_se(inc_sq);
  CHECK(std::abs(vi.mean - 1.0 / m) < 4.0 * vi.se);
}

TEST_CASE("wavelet prior: level variances follow the amplitudes") {
  for (auto kind : {CoefficientKind::gaussian, CoefficientKind::laplace}) {
    WaveletSeries spec{1.5, CoefficientDistribution(kind, 1.0), 4};
    Rng rng(3);
    std::vector<std::vector<double>> sq(5);
    for (int i = 0; i < 10000; ++i) {
      WaveletCoefficients c = sample_wavelet_coefficients(spec, rng);
      REQUIRE(c.max_level() == 4);
      for (int j = 0; j <= 4; ++j) {
        REQUIRE(c.detail[j].size() == (std::size_t{1} << j));
        sq[j].push_back(c.detail[j][0] * c.detail[j][0]);
      }
    }
    for (int j = 0; j <= 4; ++j) {
      const double expected = std::pow(2.0, -j * (2 * 1.5 + 1)) * spec.dist.variance();
      CHECK(std::abs(testutil::mean_se(sq[j]).mean - expected) < 0.05 * expected);
    }
  }
}

TEST_CASE("wavelet prior: small-ball frequencies are positive and nonincreasing") {
  PriorSpec p = PriorSpec::wavelet(1.0, {}, 6, 7);
  Rng rng(4);
  std::vector<double> sup;
  for (int i = 0; i < 100000; ++i) {
    GridFunction f = sample_wavelet_prior(p, rng);
    sup.push_back(std::max(f.max(), -f.min()));
  }
  double prev = 1.0;
  for (double eps : {1.0, 0.7, 0.5, 0.3, 0.2, 0.1}) {
    double hits = 0;
    for (double s : sup) hits += s <= eps ? 1 : 0;
    const double freq = hits / sup.size();
    if (eps >= 0.7) CHECK(freq > 0.0);
    CHECK(freq <= prev);
    prev = freq;
  }
  // Below that plain draws see nothing; the splitting estimator still resolves the ball.
  const SmallBallEstimate e = small_ball_probability(p, GridFunction::constant(7, 0.0), 0.1, 500, 5, rng);
  CHECK(e.probability > 0.0);
  CHECK(e.probability < 1e-10);
}

TEST_CASE("priors are deterministic in the seed") {
  for (const PriorSpec& p : {PriorSpec::brownian(5), PriorSpec::wavelet(2.0, {CoefficientKind::laplace, 1.0}, 4, 5),
                             PriorSpec::truncated({}, 4, 5)}) {
    Rng a = make_rng(9, 1), b = make_rng(9, 1);
    CHECK(sample_prior(p, a) == sample_prior(p, b));
  }
}

TEST_CASE("truncated prior: level frequencies") {
  PriorSpec p = PriorSpec::truncated({}, 6, 7);
  const auto law = truncation_level_law(6);
  Rng rng(5);
  std::vector<int> counts(7, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample_truncated_prior(p, rng).first];
  for (int j = 0; j <= 6; ++j) {
    const double se = std::sqrt(law[j] * (1 - law[j]) / draws);
    CHECK(std::abs(counts[j] / double(draws) - law[j]) < 3.5 * se);
  }
}

TEST_CASE("truncated prior: a level-0 draw is constant on each half") {
  PriorSpec p = PriorSpec::truncated({}, 3, 5);
  Rng rng(6);
  int seen = 0;
  while (seen < 20) {
    auto [j, f] = sample_truncated_prior(p, rng);
    if (j != 0) continue;
    ++seen;
    for (std::size_t k = 0; k < 16; ++k) {
      CHECK(f[k] == f[0]);
      CHECK(f[16 + k] == f[16]);
    }
    // scaling + c psi_00: the two halves average to the scaling coefficient.
    CHECK(integral(f) == doctest::Approx(0.5 * (f[0] + f[16])));
  }
}

TEST_CASE("property: test functions satisfy their Hoelder bound on every grid pair") {
  for (auto kind : {TestFunctionKind::cusp, TestFunctionKind::hat, TestFunctionKind::smooth}) {
    for (double beta : {0.25, 0.5, 1.0}) {
      if (kind == TestFunctionKind::smooth && beta != 1.0) {
        CHECK_THROWS(holder_test_function(beta, 1.0, kind, 6));
        continue;
      }
      for (double R : {0.5, 1.0, 3.0}) {
        GridFunction f = holder_test_function(beta, R, kind, 7);
        const double m = static_cast<double>(f.size());
        for (std::size_t a = 0; a < f.size(); ++a)
          for (std::size_t b = a + 1; b < f.size(); ++b)
            REQUIRE(std::abs(f[a] - f[b]) <= R * std::pow((b - a) / m, beta) * (1 + 1e-12));
      }
    }
  }
  GridFunction cusp = holder_test_function(1.0, 1.0, TestFunctionKind::cusp, 3);
  for (std::size_t k = 0; k < 8; ++k) CHECK(cusp[k] == doctest::Approx(std::abs((k + 0.5) / 8 - 0.5)));
  CHECK_THROWS(holder_test_function(1.5, 1.0, TestFunctionKind::cusp, 3));
  CHECK(holder_test_function(0.5, 0.0, TestFunctionKind::cusp, 3) == GridFunction::constant(3, 0.0));
}

TEST_CASE("prior configs parse") {
  std::istringstream in("kind = wavelet_series\ndist = laplace\nscale = 2\nalpha = 1.5\nj_max = 5\ngrid_level = 6\n");
  PriorSpec p = parse_prior(KeyValueConfig::parse(in));
  CHECK(p == PriorSpec::wavelet(1.5, {CoefficientKind::laplace, 2.0}, 5, 6));
  std::istringstream tr("kind = truncated_wavelet # comment\n");
  CHECK(parse_prior(KeyValueConfig::parse(tr)) == PriorSpec::truncated({}, 6, 8));
  std::istringstream bm("kind = brownian_start\ngrid_level = 10\n");
  CHECK(parse_prior(KeyValueConfig::parse(bm)) == PriorSpec::brownian(10));
  std::istringstream bad("kind = wavelet_series\nalpha = 1\ncolour = red\n");
  CHECK_THROWS_AS(parse_prior(KeyValueConfig::parse(bad)), ConfigError);
  std::istringstream unknown("kind = gaussian_process\n");
  CHECK_THROWS_AS(parse_prior(KeyValueConfig::parse(unknown)), ConfigError);
  std::istringstream invalid("kind = wavelet_series\nalpha = -1\n");
  CHECK_THROWS_AS(parse_prior(KeyValueConfig::parse(invalid)), ConfigError);
}

TEST_CASE("key-value configs") {
  std::istringstream in("# header\na = 1\nb.c = x y \nlist = 1, 2.5 ,3\n\n");
  KeyValueConfig cfg = KeyValueConfig::parse(in, "t.cfg");
  CHECK(cfg.get_int("a") == 1);
  CHECK(cfg.get_string("b.c") == "x y");
  CHECK(cfg.get_doubles("list") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(cfg.subtree("b.").get_string("c") == "x y");
  CHECK(cfg.get_double("missing", 4.0) == 4.0);
  CHECK_THROWS_AS(cfg.get_double("b.c"), ConfigError);
  CHECK_THROWS_AS(cfg.get_string("nope"), ConfigError);
  CHECK_THROWS_AS(cfg.require_known({"a", "list"}), ConfigError);
  std::istringstream broken("no equals sign\n");
  CHECK_THROWS_AS(KeyValueConfig::parse(broken), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent.cfg"), IoError);
}
