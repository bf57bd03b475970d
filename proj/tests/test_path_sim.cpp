#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "brpv/path_sim.hpp"
#include "brpv/special.hpp"

using namespace brpv;
using namespace brpv::sim;

TEST_CASE("brownian increments and determinism") {
  const Grid g(64);
  const rng::Stream s(3, 0, 0);
  const GridPath a = sample_brownian(g, s);
  const GridPath b = sample_brownian(g, s);
  CHECK(a.values == b.values);
  CHECK(a.values[0] == 0.0);
  CHECK(a.increment(5) == doctest::Approx(s.normal_at(4) / 8.0).epsilon(1e-12));
}

TEST_CASE("maximum of two Brownian motions at t = 1") {
  const Grid g(16);
  const int reps = 40000;
  double sum = 0.0;
  double diff2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const MaxTwoPaths m = sample_max_two_bm(g, rng::Stream(9, r, 0));
    sum += m.maximum.values.back();
    diff2 += m.difference.values.back() * m.difference.values.back();
    if (r < 50) {
      const rng::Stream s(9, r, 0);
      const GridPath w1 = sample_brownian(g, s.substream(1));
      const GridPath w2 = sample_brownian(g, s.substream(2));
      for (std::size_t k = 0; k < g.size(); ++k) {
        REQUIRE(m.maximum.values[k] == std::max(w1.values[k], w2.values[k]));
        REQUIRE(m.difference.values[k] == w2.values[k] - w1.values[k]);
      }
    }
  }
  // E max(Z1, Z2) = 1/sqrt(pi); sd of max is sqrt(1 - 1/pi).
  const double se = std::sqrt((1.0 - 1.0 / std::numbers::pi) / reps);
  CHECK(std::abs(sum / reps - 1.0 / std::sqrt(std::numbers::pi)) < 4.0 * se);
  CHECK(std::abs(diff2 / reps - 2.0) < 4.0 * 2.0 * std::sqrt(2.0 / reps));
}

TEST_CASE("bridge-refined Gaussian integral has independent increments") {
  const auto h = VolatilitySpec::power_law(1.0, 1.0, 1.0);
  const Grid g(37);
  const std::vector<double> clock = cumulative_variance(h, g);
  CHECK(clock.back() == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  const int reps = 40000;
  const std::vector<std::size_t> steps = {1, 13, 37};
  std::vector<double> var(steps.size(), 0.0);
  double cross = 0.0;
  for (int r = 0; r < reps; ++r) {
    const std::vector<double> x = sample_gaussian_integral(clock, rng::Stream(5, r, 1));
    for (std::size_t j = 0; j < steps.size(); ++j) {
      const double d = x[steps[j]] - x[steps[j] - 1];
      var[j] += d * d;
    }
    cross += (x[13] - x[12]) * (x[14] - x[13]);
  }
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const double v = clock[steps[j]] - clock[steps[j] - 1];
    CHECK(std::abs(var[j] / reps - v) < 5.0 * v * std::sqrt(2.0 / reps));
  }
  const double v13 = clock[13] - clock[12];
  const double v14 = clock[14] - clock[13];
  CHECK(std::abs(cross / reps) < 5.0 * std::sqrt(v13 * v14 / reps));
}

TEST_CASE("spectral process is a unit-mean martingale") {
  const auto h = VolatilitySpec::constant(1.5);
  const Grid g(32);
  const int reps = 100000;
  double mean_v = 0.0;
  double var_log = 0.0;
  for (int r = 0; r < reps; ++r) {
    const GridPath lv = sample_spectral_log(h, g, rng::Stream(13, r, 0));
    mean_v += std::exp(lv.values[16]);
    const double centred = lv.values.back() + 0.5 * 2.25;
    var_log += centred * centred;
  }
  // Var V_{1/2} = e^{1.125} - 1.
  CHECK(std::abs(mean_v / reps - 1.0) < 5.0 * std::sqrt(std::expm1(1.125) / reps));
  CHECK(std::abs(var_log / reps - 2.25) < 5.0 * 2.25 * std::sqrt(2.0 / reps));
}

TEST_CASE("envelope quantile") {
  const auto h = VolatilitySpec::constant(2.0);
  CHECK(envelope_quantile(h, 0.01) == doctest::Approx(2.0 * 2.5758293035489004).epsilon(1e-12));
  CHECK_THROWS(envelope_quantile(h, 0.0));
  CHECK_THROWS(envelope_quantile(h, 0.02));
}

TEST_CASE("Brown-Resnick bookkeeping") {
  const auto h = VolatilitySpec::power_law(0.5, 1.0, 1.0);
  const Grid g(128);
  for (int r = 0; r < 20; ++r) {
    const rng::Stream s(21, r, 0);
    const MaxStablePath p = sample_brown_resnick(h, g, s);
    REQUIRE(p.argmax_index.size() == g.size());
    REQUIRE(!p.atoms.empty());
    CHECK(p.truncation_diag.atoms_generated >= static_cast<std::int64_t>(p.atoms.size()));
    CHECK(p.truncation_diag.stop_rule_margin >= 0.0);
    for (std::size_t i = 1; i < p.atoms.size(); ++i) {
      CHECK(p.atoms[i - 1].generation < p.atoms[i].generation);
      CHECK(p.atoms[i - 1].log_r > p.atoms[i].log_r);
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      const SpectralAtom& a = p.atoms[static_cast<std::size_t>(p.argmax_index[k])];
      CHECK(std::abs(p.log_eta.values[k] - (a.log_r + a.log_v_path.values[k])) < 1e-12);
      CHECK(std::abs(a.z_path.values[k] - p.half_variance[k] - (a.log_r + a.log_v_path.values[k])) <
            1e-12);
      for (const SpectralAtom& other : p.atoms) {
        CHECK(other.z_path.values[k] <= a.z_path.values[k]);
      }
    }
    const MaxStablePath again = sample_brown_resnick(h, g, s);
    CHECK(again.log_eta.values == p.log_eta.values);
  }
}

TEST_CASE("one-dimensional margins are unit Frechet") {
  const auto h = VolatilitySpec::constant(1.0);
  const Grid g(32);
  std::vector<double> eta;
  for (int r = 0; r < 4000; ++r) {
    const MaxStablePath p = sample_brown_resnick(h, g, rng::Stream(31, r, 0));
    eta.push_back(std::exp(p.log_eta.values[g.index_of(0.5)]));
  }
  std::sort(eta.begin(), eta.end());
  const double m = static_cast<double>(eta.size());
  double d = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double f = std::exp(-1.0 / eta[i]);
    d = std::max({d, std::abs(f - i / m), std::abs((i + 1) / m - f)});
  }
  CHECK(d < 1.63 / std::sqrt(m));
}

TEST_CASE("atom budget exhaustion raises with the partial path") {
  const auto h = VolatilitySpec::constant(3.0);
  const Grid g(64);
  BrownResnickOptions opts;
  opts.epsilon = 1e-6;
  opts.atom_budget = 2;
  try {
    sample_brown_resnick(h, g, rng::Stream(1, 0, 0), opts);
    FAIL("expected truncation failure");
  } catch (const TruncationError& e) {
    CHECK(e.partial().truncation_diag.atoms_generated == 2);
  }
  opts.epsilon = 0.0;
  CHECK_THROWS(sample_brown_resnick(h, g, rng::Stream(1, 0, 0), opts));
}
