#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "brpv/gauss_kernels.hpp"
#include "brpv/path_sim.hpp"
#include "brpv/pv_stats.hpp"

using namespace brpv;
using namespace brpv::stats;

namespace {

GridPath triangular() {
  // Increments 1, 2, ..., 8.
  return GridPath(Grid(8), {0, 1, 3, 6, 10, 15, 21, 28, 36});
}

}  // namespace

TEST_CASE("power variation on an explicit path") {
  const GridPath x = triangular();
  // n^{p/2 - 1} sum_{i=1}^{7} i^p.
  CHECK(power_variation(x, 2, 1.0) == doctest::Approx(140.0));
  CHECK(power_variation(x, 1, 1.0) == doctest::Approx(28.0 / std::sqrt(8.0)));
  CHECK(power_variation(x, 2, 0.5) == doctest::Approx(1.0 + 4.0 + 9.0));
  CHECK(power_variation(x, 2, 0.1) == 0.0);
  CHECK_THROWS(power_variation(x, 0, 1.0));
  CHECK_THROWS(power_variation(x, 2, 1.2));
}

TEST_CASE("power variation series is additive") {
  const GridPath w = sim::sample_brownian(Grid(1000), rng::Stream(4, 0, 0));
  const PVSeries s = power_variation_series(w, 3);
  REQUIRE(s.values.size() == 1001);
  for (std::int64_t k : {2, 17, 500, 1000}) {
    CHECK(s.values[static_cast<std::size_t>(k)] ==
          doctest::Approx(power_variation(w, 3, k / 1000.0)).epsilon(1e-12));
  }
  // B(p)_{k} - B(p)_{k-1} = n^{p/2 - 1} |dX_{k-1}|^p.
  const double scale = std::pow(1000.0, 0.5);
  CHECK(s.values[301] - s.values[300] == doctest::Approx(scale * std::pow(std::abs(w.increment(300)), 3)));
}

TEST_CASE("local time estimators on explicit paths") {
  const GridPath x(Grid(4), {0.0, 0.5, -0.5, 0.5, 1.0});
  // |X_1| - sum sign(X_{i-1}) dX_i with sign(0) = +1.
  const double tanaka = 1.0 - (0.5 - 1.0 - 1.0 + 0.5);
  CHECK(local_time_tanaka(x, 1.0) == doctest::Approx(tanaka));
  // sqrt(n) |X| <= 1 at i - 1 = 0, 1, 2 (steps 1..3).
  CHECK(local_time_kernel(x, 1.0, 1.0) == doctest::Approx(3.0 / 2.0));
  const LocalTimeEstimate k = local_time_kernel_series(x, 1.0);
  CHECK(k.values.back() == doctest::Approx(1.5));
  CHECK(local_time_tanaka_series(x).values.back() == doctest::Approx(tanaka));
  CHECK_THROWS(local_time_kernel(x, 1.0, 0.0));
}

TEST_CASE("lambda scaling helper") {
  const LambdaScaling l = LambdaScaling::from_quadrature(2);
  CHECK(l.unit() == doctest::Approx(-4.0 / (3.0 * std::sqrt(std::numbers::pi))).epsilon(1e-9));
  CHECK(l.at(2.0) == doctest::Approx(8.0 * l.unit()).epsilon(1e-15));
}

TEST_CASE("bias functional: constant-volatility form equals the general form") {
  const double sigma = 1.7;
  const auto h = VolatilitySpec::constant(sigma);
  const Grid g(512);
  const LambdaScaling l = LambdaScaling::from_quadrature(1);
  int nonzero = 0;
  for (int r = 0; r < 30; ++r) {
    const sim::MaxStablePath p = sim::sample_brown_resnick(h, g, rng::Stream(8, r, 0));
    const double general = clt_bias_functional(p, 1, 1.0, 1.0, l);
    const double constant = clt_bias_functional_constant(p, 1, 1.0, 1.0, sigma, l.at(sigma));
    CHECK(std::abs(general - constant) <= 1e-12 * std::max(1.0, std::abs(general)));
    nonzero += general != 0.0;
    const double split = clt_bias_functional_range(p, 1, 1, 200, 1.0, l) +
                         clt_bias_functional_range(p, 1, 200, 512, 1.0, l);
    CHECK(split == doctest::Approx(general).epsilon(1e-12));
  }
  CHECK(nonzero > 0);
}

TEST_CASE("windowed H estimate recovers a constant") {
  const double sigma = 2.5;
  const GridPath w = sim::sample_brownian(Grid(1 << 14), rng::Stream(6, 0, 0));
  GridPath x(w.grid);
  for (std::size_t k = 0; k < x.values.size(); ++k) {
    x.values[k] = sigma * w.values[k];
  }
  const HEstimate e = estimate_h(x, 2, 512);
  double err = 0.0;
  for (double v : e.h_hat.values) {
    err = std::max(err, std::abs(v - sigma));
  }
  // 512 squared increments: relative sd of H_hat is about 1/sqrt(1024).
  CHECK(err < sigma * 6.0 / std::sqrt(1024.0));
  CHECK(e.edge_truncated.front());
  CHECK(!e.edge_truncated[e.edge_truncated.size() / 2]);
  CHECK_THROWS(estimate_h(x, 2, 8));
  CHECK_THROWS(estimate_h(x, 2, 1 << 13));
}
