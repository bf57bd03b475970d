#include <doctest.h>

#include <cmath>
#include <sstream>

#include "brpv/csv.hpp"
#include "brpv/grid.hpp"
#include "brpv/special.hpp"
#include "brpv/volatility.hpp"
#include "oracles.hpp"

using namespace brpv;

TEST_CASE("grid indexing") {
  const Grid g(8);
  CHECK(g.size() == 9);
  CHECK(g.time(4) == 0.5);
  CHECK(g.index_of(0.5) == 4);
  CHECK(g.index_of(0.49) == 3);
  CHECK(g.index_of(1.0) == 8);
  CHECK_THROWS_AS(g.index_of(1.5), std::domain_error);
  CHECK_THROWS_AS(Grid(1), std::invalid_argument);
  CHECK_THROWS(GridPath(g, std::vector<double>(3, 0.0)));
  GridPath p(g, {0, 1, 3, 6, 10, 15, 21, 28, 36});
  CHECK(p.increment(3) == 3.0);
}

TEST_CASE("volatility forms") {
  const auto c = VolatilitySpec::constant(2.0);
  CHECK(c(0.3) == 2.0);
  CHECK(c.is_constant());
  CHECK_THROWS(VolatilitySpec::constant(0.0));

  const auto pl = VolatilitySpec::power_law(1.0, 1.0, 1.0);
  CHECK(pl(0.25) == doctest::Approx(1.25));
  CHECK(pl.inf_h() == doctest::Approx(1.0));
  CHECK(pl.sup_h() == doctest::Approx(2.0));
  CHECK_THROWS(VolatilitySpec::power_law(1.0, 1.0, 0.4));
  CHECK_THROWS(VolatilitySpec::power_law(-1.0, 0.5, 1.0));

  const auto t = VolatilitySpec::table({0.0, 0.5, 1.0}, {1.0, 3.0, 2.0});
  CHECK(t(0.25) == doctest::Approx(2.0));
  CHECK(t(0.75) == doctest::Approx(2.5));
  CHECK_THROWS(VolatilitySpec::table({0.1, 1.0}, {1.0, 1.0}));
  CHECK_THROWS(VolatilitySpec::table({0.0, 0.6, 0.5, 1.0}, {1.0, 1.0, 1.0, 1.0}));

  std::istringstream in("s,H_s\n0,1\n0.5,3\n1,2\n");
  const auto r = VolatilitySpec::read_table_csv(in);
  CHECK(r(0.75) == doctest::Approx(2.5));
}

TEST_CASE("integrated powers against trapezoid") {
  const VolatilitySpec forms[] = {
      VolatilitySpec::constant(1.7),
      VolatilitySpec::power_law(1.0, 0.5, 1.0),
      VolatilitySpec::power_law(0.5, 2.0, 2.5),
      VolatilitySpec::table({0.0, 0.3, 0.8, 1.0}, {1.0, 2.0, 0.5, 1.5}),
  };
  for (const auto& h : forms) {
    for (int k = 1; k <= 4; ++k) {
      for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.1, 0.65}, std::pair{0.3, 0.3}}) {
        const double ref = oracle::trapezoid([&](double s) { return std::pow(h(s), k); }, a, b, 200000);
        CHECK(std::abs(h.integrated_power(a, b, k) - ref) < 1e-8);
      }
    }
    CHECK(integrated_variance(h, 0.0, 1.0) == doctest::Approx(h.integrated_power(0.0, 1.0, 2)));
  }
}

TEST_CASE("normal special functions") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_sf(37.0) > 0.0);
  CHECK(normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(normal_sf_inverse(0.025) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(mills_ratio(30.0) == doctest::Approx(1.0 / 30.0).epsilon(2e-3));
  CHECK_THROWS(normal_sf_inverse(0.0));
}

TEST_CASE("csv number formatting round-trips") {
  for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, 0.0}) {
    CHECK(csv::parse_double(csv::format_double(v)) == v);
  }
  CHECK_THROWS(csv::parse_double("1.5x"));
  CHECK_THROWS(csv::parse_int("3.0"));
  CHECK(csv::split("a,b,,c").size() == 4);
}
