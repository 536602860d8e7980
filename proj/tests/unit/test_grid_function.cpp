#include <doctest.h>

#include <sstream>

#include "bbayes/errors.hpp"
#include "bbayes/grid_function.hpp"
#include "helpers.hpp"

using namespace bbayes;

TEST_CASE("bins are left-closed and x = 1 belongs to the last bin") {
  GridFunction f(2, {0.0, 1.0, 2.0, 3.0});
  CHECK(f.bin_of(0.0) == 0);
  CHECK(f.bin_of(0.25) == 1);
  CHECK(f.bin_of(0.2499999) == 0);
  CHECK(f.bin_of(0.75) == 3);
  CHECK(f.bin_of(1.0) == 3);
  CHECK(f.at(0.5) == 2.0);
  CHECK(f.min() == 0.0);
  CHECK(f.max() == 3.0);
}

TEST_CASE("construction rejects bad sizes and values") {
  CHECK_THROWS_AS(GridFunction(2, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(1, {1.0, NAN}), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction::constant(-1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction::constant(GridFunction::kMaxLevel + 1, 0.0), std::invalid_argument);
}

TEST_CASE("refinement replicates bins") {
  GridFunction f(1, {1.0, -2.0});
  GridFunction g = f.refined(3);
  REQUIRE(g.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(g[k] == (k < 4 ? 1.0 : -2.0));
  CHECK_THROWS(g.refined(1));
}

TEST_CASE("pointwise operations work across levels") {
  GridFunction f(1, {0.0, 2.0});
  GridFunction g(2, {1.0, -1.0, 3.0, 1.0});
  GridFunction mx = pointwise_max(f, g);
  GridFunction mn = pointwise_min(f, g);
  CHECK(mx == GridFunction(2, {1.0, 0.0, 3.0, 2.0}));
  CHECK(mn == GridFunction(2, {0.0, -1.0, 2.0, 1.0}));
  CHECK(difference(g, f) == GridFunction(2, {1.0, -1.0, 1.0, -1.0}));
  CHECK(dominated_by(mn, f));
  CHECK(dominated_by(mn, g));
  CHECK_FALSE(dominated_by(f, g));
}

TEST_CASE("GridFunction CSV round trip is exact") {
  Rng rng(5);
  GridFunction f = testutil::random_function(5, rng);
  std::stringstream ss;
  write_csv(ss, f);
  CHECK(ss.str().rfind("# grid_level=5\n", 0) == 0);
  CHECK(read_grid_function_csv(ss) == f);
}

TEST_CASE("concatenated GridFunction CSVs read back as a list") {
  Rng rng(6);
  std::vector<GridFunction> fs{testutil::random_function(2, rng), testutil::random_function(3, rng),
                               testutil::random_function(2, rng)};
  std::stringstream ss;
  for (const auto& f : fs) write_csv(ss, f);
  CHECK(read_grid_function_list(ss) == fs);
}

TEST_CASE("PointPattern CSV round trip and header") {
  PointPattern p(12.5, 3.0, {{0.1, 0.2}, {1.0, -0.5}, {0.0, 3.0}});
  std::stringstream ss;
  write_csv(ss, p);
  std::string first;
  std::getline(ss, first);
  CHECK(first == "# intensity=12.5 ceiling=3");
  ss.seekg(0);
  CHECK(read_point_pattern_csv(ss) == p);
}

TEST_CASE("PointPattern validates points") {
  PointPattern p(1.0, 1.0);
  CHECK_THROWS(p.add({1.5, 0.0}));
  CHECK_THROWS(p.add({0.5, 2.0}));
  CHECK_THROWS(PointPattern(0.0, 1.0));
  p.add({0.5, 1.0});
  CHECK(p.size() == 1);
}

TEST_CASE("malformed CSV raises IoError") {
  std::stringstream missing("1\n2\n");
  CHECK_THROWS_AS(read_grid_function_csv(missing), IoError);
  std::stringstream short_block("# grid_level=2\n1\n2\n");
  CHECK_THROWS_AS(read_grid_function_csv(short_block), IoError);
  CHECK_THROWS_AS(load_grid_function("/nonexistent/f.csv"), IoError);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, -1e-300, 123456.789, 1.0 / 3.0}) CHECK(std::stod(format_double(v)) == v);
}
