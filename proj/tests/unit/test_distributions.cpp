#include <doctest.h>

#include <cmath>
#include <functional>

#include "bbayes/distributions.hpp"
#include "bbayes/line_conditional.hpp"
#include "helpers.hpp"

using namespace bbayes;

TEST_CASE("density examples") {
  CHECK(density_at({CoefficientKind::gaussian, 1.0}, 0.0) == doctest::Approx(0.398942).epsilon(1e-6));
  CHECK(density_at({CoefficientKind::laplace, 1.0}, 0.0) == doctest::Approx(0.5));
  CHECK(density_at({CoefficientKind::uniform, 1.0}, 2.0) == 0.0);
  CHECK(density_at({CoefficientKind::gaussian, 2.0}, 1.0) ==
        doctest::Approx(std::exp(-1.0 / 8.0) / std::sqrt(8.0 * M_PI)));
  CHECK(density_at({CoefficientKind::laplace, 0.5}, -1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(log_density_at({CoefficientKind::uniform, 1.0}, 2.0) == -INFINITY);
  CHECK_THROWS(CoefficientDistribution(CoefficientKind::gaussian, 0.0));
}

TEST_CASE("property: densities are symmetric, unimodal and below the exponential tail envelope") {
  for (auto kind : {CoefficientKind::gaussian, CoefficientKind::laplace, CoefficientKind::uniform}) {
    for (double s : {0.3, 1.0, 2.5}) {
      CoefficientDistribution d(kind, s);
      double prev = density_at(d, 0.0);
      for (double x = 0.01; x < 20.0; x += 0.01) {
        CHECK(density_at(d, x) == density_at(d, -x));
        CHECK(density_at(d, x) <= prev);
        prev = density_at(d, x);
      }
      if (auto g = d.tail_rate()) {
        for (double x = -30.0; x <= 30.0; x += 0.05)
          CHECK(density_at(d, x) <= std::exp(-*g * std::abs(x)) / *g * (1.0 + 1e-12));
      } else {
        CHECK(kind == CoefficientKind::uniform);
      }
    }
  }
}

TEST_CASE("normal tail helpers agree with erfc") {
  for (double z : {-8.0, -3.0, -0.5, 0.0, 0.7, 4.0, 9.0}) {
    CHECK(normal_cdf(z) == doctest::Approx(testutil::std_normal_cdf(z)).epsilon(1e-12));
    CHECK(log_normal_sf(z) == doctest::Approx(std::log(0.5 * std::erfc(z / std::sqrt(2.0)))).epsilon(1e-10));
  }
  // Deep tail: Mills ratio asymptotics.
  const double z = 40.0;
  CHECK(log_normal_sf(z) == doctest::Approx(-z * z / 2 - std::log(z * std::sqrt(2 * M_PI)) - 1.0 / (z * z)).epsilon(1e-6));
  CHECK(log_normal_mass(1.0, 1.0) == -INFINITY);
  CHECK(log_normal_mass(-1.0, 2.0) ==
        doctest::Approx(std::log(testutil::std_normal_cdf(2.0) - testutil::std_normal_cdf(-1.0))));
}

TEST_CASE("law masses and cdfs against quadrature") {
  for (auto kind : {CoefficientKind::gaussian, CoefficientKind::laplace, CoefficientKind::uniform}) {
    CoefficientDistribution d(kind, 0.8);
    for (auto [a, b] : {std::pair{-0.3, 0.5}, std::pair{0.2, 1.7}, std::pair{-2.0, -0.1}}) {
      const double oracle =
          testutil::simpson_pieces([&](double x) { return density_at(d, x); }, a, b, {-0.8, 0.0, 0.8}, 20000);
      CHECK(std::exp(log_law_mass(d, a, b)) == doctest::Approx(oracle).epsilon(1e-6));
      CHECK(d.cdf(b) - d.cdf(a) == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: truncated draws stay inside and have the right mean") {
  Rng rng(3);
  for (auto kind : {CoefficientKind::gaussian, CoefficientKind::laplace, CoefficientKind::uniform}) {
    CoefficientDistribution d(kind, 1.0);
    for (auto [a, b] : {std::pair{-0.5, 0.3}, std::pair{0.4, 0.9}, std::pair{-0.9, 0.8}}) {
      const double z = testutil::simpson([&](double x) { return density_at(d, x); }, a, b, 4000);
      const double m = testutil::simpson([&](double x) { return x * density_at(d, x); }, a, b, 4000) / z;
      std::vector<double> xs;
      for (int i = 0; i < 20000; ++i) {
        const double x = sample_truncated(d, a, b, rng);
        REQUIRE(x >= a);
        REQUIRE(x <= b);
        xs.push_back(x);
      }
      const auto ms = testutil::mean_se(xs);
      CHECK(std::abs(ms.mean - m) < 4.0 * ms.se);
    }
  }
  // Far in the gaussian tail.
  for (int i = 0; i < 100; ++i) {
    const double x = truncated_standard_normal(30.0, INFINITY, rng);
    CHECK(x >= 30.0);
    CHECK(x < 31.0);
  }
  CHECK_THROWS(sample_truncated({CoefficientKind::uniform, 1.0}, 2.0, 3.0, rng));
}

TEST_CASE("property: coefficient draws are centred with the stated variance") {
  Rng rng(4);
  for (auto kind : {CoefficientKind::gaussian, CoefficientKind::laplace, CoefficientKind::uniform}) {
    CoefficientDistribution d(kind, 1.3);
    std::vector<double> xs, sq;
    for (int i = 0; i < 40000; ++i) {
      xs.push_back(d.sample(rng));
      sq.push_back(xs.back() * xs.back());
    }
    const auto m = testutil::mean_se(xs);
    const auto v = testutil::mean_se(sq);
    CHECK(std::abs(m.mean) < 3.5 * m.se);
    CHECK(std::abs(v.mean - d.variance()) < 4.0 * v.se);
  }
}

namespace {

// Unnormalised log-density of a line conditional, written out directly.
double line_log_density(const std::vector<LineTerm>& terms, double tilt, double t) {
  double s = tilt * t;
  for (const auto& term : terms) s += log_density_at(term.law, term.value + t * term.direction);
  return s;
}

}  // namespace

TEST_CASE("property: line conditionals match quadrature") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<LineTerm> terms;
    const int count = 1 + rep % 4;
    for (int i = 0; i < count; ++i) {
      const auto kind = static_cast<CoefficientKind>((rep + i) % 2);  // gaussian or laplace
      terms.push_back({CoefficientDistribution(kind, 0.5 + uniform01(rng)), uniform01(rng) - 0.5,
                       (i % 2 ? -1.0 : 1.0) * (0.3 + uniform01(rng))});
    }
    if (rep % 5 == 0) terms.push_back({CoefficientDistribution(CoefficientKind::uniform, 1.0), 0.2, 0.7});
    const double tilt = 3.0 * (uniform01(rng) - 0.3);
    const double lo = -1.0 - uniform01(rng), hi = 0.5 + uniform01(rng);
    LineConditional lc(terms, tilt, lo, hi);
    auto dens = [&](double t) { return std::exp(line_log_density(terms, tilt, t)); };
    // Kinks and support edges of the terms, in t.
    std::vector<double> breaks;
    for (const auto& term : terms) {
      breaks.push_back(-term.value / term.direction);
      if (term.law.kind == CoefficientKind::uniform) {
        breaks.push_back((-term.law.scale - term.value) / term.direction);
        breaks.push_back((term.law.scale - term.value) / term.direction);
      }
    }
    auto integrate = [&](const std::function<double(double)>& g) {
      return testutil::simpson_pieces(g, lo, hi, breaks, 4000);
    };
    const double z = integrate(dens);
    CHECK(std::exp(lc.log_normalizer()) == doctest::Approx(z).epsilon(1e-6));
    const double t_mid = 0.5 * (lo + hi);
    if (dens(t_mid) > 0.0)
      CHECK(lc.log_density(t_mid) == doctest::Approx(line_log_density(terms, tilt, t_mid) - std::log(z)).epsilon(1e-6));
    const double mean = integrate([&](double t) { return t * dens(t); }) / z;
    std::vector<double> ts;
    for (int i = 0; i < 5000; ++i) {
      const double t = lc.sample(rng);
      REQUIRE(t >= lo);
      REQUIRE(t <= hi);
      ts.push_back(t);
    }
    const auto ms = testutil::mean_se(ts);
    CHECK(std::abs(ms.mean - mean) < 4.0 * ms.se);
  }
}

TEST_CASE("line conditional on a one-sided infinite interval") {
  std::vector<LineTerm> terms{{CoefficientDistribution(CoefficientKind::gaussian, 1.0), 0.0, 1.0}};
  LineConditional lc(terms, 0.0, -INFINITY, 0.0);
  CHECK(std::exp(lc.log_normalizer()) == doctest::Approx(0.5));
  Rng rng(6);
  for (int i = 0; i < 100; ++i) CHECK(lc.sample(rng) <= 0.0);
}
