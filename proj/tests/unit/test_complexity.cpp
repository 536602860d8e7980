#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "bbayes/complexity.hpp"
#include "bbayes/errors.hpp"
#include "bbayes/model.hpp"
#include "helpers.hpp"

using namespace bbayes;

namespace {

FunctionDictionary random_dictionary(Rng& rng, std::size_t size, int level = 3) {
  std::vector<GridFunction> m;
  for (std::size_t i = 0; i < size; ++i) m.push_back(testutil::random_function(level, rng, 0.0, 1.0));
  return FunctionDictionary(std::move(m));
}

FunctionDictionary constants(std::vector<double> cs) {
  std::vector<GridFunction> m;
  for (double c : cs) m.push_back(GridFunction::constant(2, c));
  return FunctionDictionary(std::move(m));
}

// Cheapest cover by exhaustive search over subsets of the candidate sets.
double brute_force_cover(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets,
                         const std::vector<double>& costs) {
  double best = INFINITY;
  for (std::size_t mask = 1; mask < (std::size_t{1} << sets.size()); ++mask) {
    std::vector<bool> hit(universe, false);
    double cost = 0.0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      if (!((mask >> s) & 1u)) continue;
      cost += costs[s];
      for (std::size_t e : sets[s]) hit[e] = true;
    }
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) best = std::min(best, cost);
  }
  return best;
}

double brute_force_covering(const FunctionDictionary& d, double eps) {
  std::vector<std::vector<std::size_t>> sets(d.size());
  for (std::size_t c = 0; c < d.size(); ++c)
    for (std::size_t f = 0; f < d.size(); ++f)
      if (sup_distance(d[c], d[f]) <= eps) sets[c].push_back(f);
  return brute_force_cover(d.size(), sets, std::vector<double>(d.size(), 1.0));
}

}  // namespace

TEST_CASE("covering number examples") {
  const double eps = 0.3;
  FunctionDictionary d = constants({0.0, eps, 2 * eps});
  ComplexityResult one = covering_number(d, eps * (1 + 1e-12), true);
  CHECK(one.value == 1.0);
  CHECK(one.chosen == std::vector<std::size_t>{1});
  CHECK(covering_number(d, eps / 2, true).value == 3.0);
  CHECK(covering_number(d, eps / 2, false).value == 3.0);
  CHECK_THROWS_AS(covering_number(d, 0.0, true), std::invalid_argument);
  Rng rng(1);
  CHECK_THROWS_AS(covering_number(random_dictionary(rng, 21), 0.1, true), std::length_error);
  CHECK(covering_number(random_dictionary(rng, 21), 0.1, false).method == "greedy");
}

TEST_CASE("bracketing and separation examples") {
  FunctionDictionary single = constants({0.4});
  for (double delta : {0.0, 0.1, 1.0}) CHECK(one_sided_bracketing_number(single, delta, single).value == 1.0);
  const double delta = 0.2;
  FunctionDictionary two = constants({0.0, delta});
  CHECK(one_sided_bracketing_number(two, delta, constants({0.0})).value == 1.0);
  CHECK(one_sided_bracketing_number(two, delta / 2, two).value == 2.0);

  GridFunction f0 = GridFunction::constant(2, 0.1);
  const double n = 7.0;
  CHECK(separation_quantity(single, f0, n, single).value == doctest::Approx(std::exp(-n * 0.3)));

  // f0 above every pool element: each term is 1, so the value is the cover size.
  FunctionDictionary d = constants({0.0, 0.1, 0.2, 0.5});
  ComplexityResult s = separation_quantity(d, GridFunction::constant(2, 5.0), n, d);
  CHECK(s.value == 1.0);
  CHECK(s.exact);

  try {
    one_sided_bracketing_number(constants({0.0, 1.0}), 0.1, constants({0.5}));
    FAIL("expected UncoverableMemberError");
  } catch (const UncoverableMemberError& e) {
    CHECK(e.member() == 0);
  }
  CHECK_THROWS_AS(separation_quantity(constants({0.0}), f0, n, constants({0.5})), UncoverableMemberError);
  CHECK_THROWS_AS(separation_quantity(d, f0, 0.0, d), std::invalid_argument);
}

TEST_CASE("property: exact solvers match a brute-force oracle and greedy never beats them") {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t size = 4 + rep % 9;
    FunctionDictionary d = random_dictionary(rng, size);
    const double eps = 0.2 + 0.4 * uniform01(rng);
    const ComplexityResult exact = covering_number(d, eps, true);
    CHECK(exact.exact);
    CHECK(exact.value == brute_force_covering(d, eps));
    CHECK(covering_number(d, eps, false).value >= exact.value);
    CHECK(covering_number(d, eps, false).value <= exact.value * (1.0 + std::log(size)));

    // Pool: the dictionary plus a few pairwise minima, small enough to enumerate.
    FunctionDictionary full = with_pairwise_minima(d);
    std::vector<GridFunction> pm = d.members();
    for (std::size_t i = size; i < std::min<std::size_t>(full.size(), 16); ++i) pm.push_back(full[i]);
    FunctionDictionary pool(pm);
    const double delta = 0.1 + 0.3 * uniform01(rng);
    std::vector<std::vector<std::size_t>> sets(pool.size());
    for (std::size_t l = 0; l < pool.size(); ++l)
      for (std::size_t f = 0; f < size; ++f)
        if (dominated_by(pool[l], d[f]) && integral(d[f]) - integral(pool[l]) <= delta) sets[l].push_back(f);
    const ComplexityResult br = one_sided_bracketing_number(d, delta, pool, CoverMethod::exact);
    CHECK(br.value == brute_force_cover(size, sets, std::vector<double>(pool.size(), 1.0)));
    CHECK(one_sided_bracketing_number(d, delta, pool, CoverMethod::greedy).value >= br.value);

    GridFunction f0 = testutil::random_function(3, rng, 0.0, 1.0);
    const double n = 1.0 + 20.0 * uniform01(rng);
    std::vector<std::vector<std::size_t>> lower(pool.size());
    std::vector<double> costs(pool.size());
    for (std::size_t l = 0; l < pool.size(); ++l) {
      costs[l] = std::exp(-n * positive_part_integral(pool[l], f0));
      for (std::size_t f = 0; f < size; ++f)
        if (dominated_by(pool[l], d[f])) lower[l].push_back(f);
    }
    const ComplexityResult sep = separation_quantity(d, f0, n, pool, CoverMethod::exact);
    CHECK(sep.value == doctest::Approx(brute_force_cover(size, lower, costs)).epsilon(1e-12));
    CHECK(separation_quantity(d, f0, n, pool, CoverMethod::greedy).value >= sep.value * (1 - 1e-12));
  }
}

TEST_CASE("set cover by enumeration for wide universes") {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t universe = 30, count = 12;
    std::vector<std::vector<std::size_t>> sets(count);
    std::vector<double> costs(count);
    for (std::size_t s = 0; s < count; ++s) {
      costs[s] = 0.1 + uniform01(rng);
      for (std::size_t e = 0; e < universe; ++e)
        if (uniform01(rng) < 0.3) sets[s].push_back(e);
    }
    for (std::size_t e = 0; e < universe; ++e) sets[e % count].push_back(e);
    for (auto& s : sets) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    SetCoverSolution sol = solve_set_cover(universe, sets, costs, CoverMethod::automatic);
    CHECK(sol.method == "exact_enumeration");
    CHECK(sol.cost == doctest::Approx(brute_force_cover(universe, sets, costs)));
  }
  CHECK_THROWS_AS(solve_set_cover(2, {{0, 1}}, {1.0, 2.0}, CoverMethod::automatic), std::invalid_argument);
  CHECK_THROWS_AS(solve_set_cover(2, {{0, 5}}, {1.0}, CoverMethod::automatic), std::invalid_argument);
}

TEST_CASE("property: complexity functionals are monotone") {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    FunctionDictionary d = random_dictionary(rng, 10);
    FunctionDictionary pool = with_pairwise_minima(d);
    GridFunction f0 = testutil::random_function(3, rng, 0.0, 1.0);
    double last_cover = INFINITY, last_bracket = INFINITY, last_sep = INFINITY;
    for (double t : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      const double c = covering_number(d, t, true).value;
      const double b = one_sided_bracketing_number(d, t, pool).value;
      CHECK(c <= last_cover);
      CHECK(b <= last_bracket);
      last_cover = c;
      last_bracket = b;
    }
    for (double n : {1.0, 5.0, 20.0, 100.0}) {
      const double s = separation_quantity(d, f0, n, pool).value;
      CHECK(s <= last_sep * (1 + 1e-12));
      last_sep = s;
    }
  }
}

TEST_CASE("property: separation, bracketing and covering chain") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    FunctionDictionary d = random_dictionary(rng, 12);
    GridFunction f0 = testutil::random_function(3, rng, 0.0, 0.6);
    const double eps = 0.1 + 0.2 * uniform01(rng), n = 5.0 + 50.0 * uniform01(rng);
    std::vector<GridFunction> far = upper_excess_members(d, f0, eps);
    if (far.empty()) continue;
    FunctionDictionary b(far);
    FunctionDictionary pool = with_pairwise_minima(d);
    const double s = separation_quantity(b, f0, n, pool).value;
    const double nb = one_sided_bracketing_number(d, eps / 2, pool).value;
    CHECK(s <= std::exp(-n * eps / 2) * nb * (1 + 1e-12));

    // Centres shifted down by eps/4 bracket every member of their eps/4 ball.
    std::vector<GridFunction> shifted;
    for (const auto& c : d.members()) shifted.push_back(c - eps / 4);
    const double nb_shifted = one_sided_bracketing_number(d, eps / 2, FunctionDictionary(shifted)).value;
    CHECK(nb_shifted <= covering_number(d, eps / 4, true).value);
  }
}

TEST_CASE("upper excess members and pairwise minima") {
  FunctionDictionary d = constants({0.0, 0.5, 1.0});
  CHECK(upper_excess_members(d, GridFunction::constant(2, 0.25), 0.25).size() == 2);
  FunctionDictionary m = with_pairwise_minima(d);
  CHECK(m.size() == 6);
  CHECK(m[3] == GridFunction::constant(2, 0.0));
  CHECK(m[5] == GridFunction::constant(2, 0.5));
  CHECK_THROWS(FunctionDictionary({}));
  CHECK_THROWS(FunctionDictionary({GridFunction::constant(1, 0.0), GridFunction::constant(2, 0.0)}));
}
