#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <vector>

#include "brpv/mc_harness.hpp"

using namespace brpv::harness;

TEST_CASE("ks statistics on small samples") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic({0.5}, uniform) == doctest::Approx(0.5));
  CHECK(ks_statistic({0.25, 0.75}, uniform) == doctest::Approx(0.25));
  CHECK(ks_statistic({0.0, 0.0}, uniform) == doctest::Approx(1.0));
  CHECK(ks_two_sample({1, 2, 3}, {3, 2, 1}) == 0.0);
  CHECK(ks_two_sample({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_two_sample({1, 3}, {2, 4}) == doctest::Approx(0.5));
}

TEST_CASE("stable_sum ignores order") {
  std::mt19937_64 gen(2);
  std::lognormal_distribution<double> d(0.0, 4.0);
  std::vector<double> x(5000);
  for (double& v : x) {
    v = d(gen) * ((gen() & 1) ? 1.0 : -1.0);
  }
  const double ref = stable_sum(x);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(x.begin(), x.end(), gen);
    CHECK(stable_sum(x) == ref);
  }
  CHECK(stable_sum({1e16, 1.0, -1e16}) == 1.0);
}

TEST_CASE("mean and regression helpers") {
  const MeanStat m = mean_stat({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.variance == doctest::Approx(5.0 / 3.0));
  const Regression r = ols({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(r.slope == doctest::Approx(2.0));
  CHECK(r.intercept == doctest::Approx(1.0));
  CHECK(r.r2 == doctest::Approx(1.0));
  CHECK(r.residual_variance == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("config names, validation and JSON") {
  CHECK(parse_experiment("lln") == Experiment::lln);
  CHECK(to_string(Experiment::moment_bias) == "moment_bias");
  CHECK(parse_model("max2bm") == Model::max2bm);
  CHECK_THROWS_AS(parse_experiment("nope"), std::invalid_argument);

  ExperimentConfig c;
  c.p = 3;
  c.sigma = 1.5;
  c.reps = 17;
  const auto j = c.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  ExperimentConfig other = c;
  other.master_seed += 1;
  CHECK(config_hash(other) != config_hash(c));

  auto bad = j;
  bad["unknown_key"] = 1;
  CHECK_THROWS(ExperimentConfig::from_json(bad));
  ExperimentConfig invalid;
  invalid.p = 0;
  CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
  invalid = ExperimentConfig{};
  invalid.n = 1000;
  CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
}

TEST_CASE("volatility JSON round trip") {
  for (const auto& h : {brpv::VolatilitySpec::constant(2.0),
                        brpv::VolatilitySpec::power_law(1.0, 0.5, 1.5),
                        brpv::VolatilitySpec::table({0.0, 0.5, 1.0}, {1.0, 2.0, 1.5})}) {
    const auto j = volatility_to_json(h);
    CHECK(volatility_to_json(volatility_from_json(j)) == j);
  }
}

TEST_CASE("reports are reproducible across runs and thread counts") {
  ExperimentConfig c;
  c.experiment = Experiment::lln;
  c.model = Model::br;
  c.n = 256;
  c.reps = 24;
  c.sigma = 1.3;
  setenv("MAXSTABLE_PV_THREADS", "1", 1);
  const auto one = run_experiment(c).to_json(false);
  setenv("MAXSTABLE_PV_THREADS", "3", 1);
  const auto three = run_experiment(c).to_json(false);
  unsetenv("MAXSTABLE_PV_THREADS");
  CHECK(one.dump() == three.dump());
  CHECK(one.contains("verdicts"));
  CHECK(!one.contains("wall_time"));
  CHECK(one["per_replicate"]["rows"].size() == 24);
}

TEST_CASE("exhausted atom budgets surface as insufficient replicates") {
  ExperimentConfig c;
  c.experiment = Experiment::lln;
  c.model = Model::br;
  c.n = 64;
  c.reps = 4;
  c.sigma = 3.0;
  c.atom_budget = 2;
  c.epsilon = 1e-6;
  CHECK_THROWS_AS(run_experiment(c), InsufficientReplicates);
}
