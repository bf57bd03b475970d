// Runs the ten acceptance criteria end to end and prints one PASS/FAIL line
// per criterion, followed by the individual checks behind it. Exit status is
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "brpv/gauss_kernels.hpp"
#include "brpv/increment_law.hpp"
#include "brpv/mc_harness.hpp"

using namespace brpv;
using harness::Experiment;
using harness::ExperimentConfig;
using harness::ExperimentReport;
using harness::Model;

namespace {

struct Check {
  std::string name;
  double measured;
  std::string comparison;
  double threshold;
  bool pass;
};

struct Outcome {
  std::vector<Check> checks;
  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) {
        return false;
      }
    }
    return !checks.empty();
  }
};

void add_report(Outcome& o, const std::string& label, const ExperimentReport& r) {
  for (const auto& v : r.verdicts) {
    o.checks.push_back({label + "/" + v.name, v.measured, v.comparison, v.threshold, v.pass});
  }
  if (!r.truncation_failures.empty()) {
    o.checks.push_back({label + "/truncation_failures",
                        static_cast<double>(r.truncation_failures.size()), "==", 0.0, false});
  }
}

void below(Outcome& o, const std::string& name, double measured, double threshold) {
  o.checks.push_back({name, measured, "<", threshold, measured < threshold});
}

nlohmann::json one_plus_s() {
  return {{"form", "power_law"}, {"a", 1.0}, {"b", 1.0}, {"gamma", 1.0}};
}

ExperimentConfig make(Experiment e, Model m, int p, std::int64_t n, std::int64_t reps) {
  ExperimentConfig c;
  c.experiment = e;
  c.model = m;
  c.p = p;
  c.n = n;
  c.reps = reps;
  return c;
}

Outcome exact_identities() {
  Outcome o;
  double sym = 0.0;
  double centre = 0.0;
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (std::int64_t n : {1, 16, 256, 100000}) {
      const increment::IncrementLawParams p{sigma, n};
      centre = std::max(centre, std::abs(increment::marginal_cdf(0.0, p) - 0.5));
      for (int k = 1; k <= 200; ++k) {
        const double u = 0.05 * k;
        sym = std::max(sym, std::abs(increment::marginal_cdf(u, p) +
                                     increment::marginal_cdf(-u, p) - 1.0));
      }
    }
  }
  below(o, "cdf_symmetry", sym, 1e-12);
  below(o, "cdf_centre", centre, 1e-12);
  double rec = 0.0;
  for (int p = 1; p <= 6; ++p) {
    const double rhs = (p + 1) * kernels::abs_moment(p);
    rec = std::max(rec, std::abs(kernels::abs_moment(p + 2) - rhs) / rhs);
  }
  below(o, "moment_recurrence", rec, 1e-12);
  // Ratio of the scaling defect to the combined quadrature error bound.
  double worst = 0.0;
  const kernels::QuadratureConfig q;
  for (int p = 1; p <= 3; ++p) {
    const Estimate unit = kernels::lambda_integral(p, 1.0, kernels::KernelKind::phi, q);
    for (double sigma : {0.5, 1.0, 2.0}) {
      const Estimate s = kernels::lambda_integral(p, sigma, kernels::KernelKind::phi, q);
      const double f = std::pow(sigma, p + 1);
      const double tol = std::max(s.error + f * unit.error,
                                  q.rel_tol * std::abs(s.value) + q.abs_tol);
      worst = std::max(worst, std::abs(s.value - f * unit.value) / tol);
    }
  }
  o.checks.push_back({"lambda_scaling_defect_over_tolerance", worst, "<=", 1.0, worst <= 1.0});
  const double i0 = kernels::bias_integrand(1, 0.0);
  o.checks.push_back({"bias_integrand_at_0", i0, "==", 0.0, i0 == 0.0});
  const double b30 = kernels::bias_bracket(30.0);
  o.checks.push_back({"bias_bracket_at_30_in_(-0.51,-0.49)", b30, "in", -0.5,
                      b30 > -0.51 && b30 < -0.49});
  return o;
}

Outcome moment_bias() {
  Outcome o;
  for (int p : {1, 2}) {
    add_report(o, "p" + std::to_string(p),
               harness::run_experiment(make(Experiment::moment_bias, Model::br, p, 1024, 2)));
  }
  return o;
}

Outcome distributional() {
  Outcome o;
  add_report(o, "br", harness::run_experiment(make(Experiment::distributional, Model::br, 2, 256, 10000)));
  return o;
}

Outcome marginal_increment() {
  Outcome o;
  add_report(o, "br",
             harness::run_experiment(make(Experiment::marginal_increment, Model::br, 2, 256, 10000)));
  return o;
}

Outcome lln() {
  Outcome o;
  const std::int64_t n = 1 << 14;
  for (int p : {1, 2}) {
    add_report(o, "max2bm_p" + std::to_string(p),
               harness::run_experiment(make(Experiment::lln, Model::max2bm, p, n, 200)));
  }
  for (double sigma : {1.0, 2.0}) {
    for (int p : {1, 2}) {
      auto c = make(Experiment::lln, Model::br, p, n, 200);
      c.sigma = sigma;
      add_report(o, "br_sigma" + std::to_string(static_cast<int>(sigma)) + "_p" + std::to_string(p),
                 harness::run_experiment(c));
    }
  }
  auto c = make(Experiment::lln, Model::br, 2, n, 200);
  c.h_spec = one_plus_s();
  add_report(o, "br_1+s_p2", harness::run_experiment(c));
  return o;
}

Outcome clt() {
  Outcome o;
  add_report(o, "max2bm", harness::run_experiment(make(Experiment::clt, Model::max2bm, 2, 4096, 1000)));
  add_report(o, "br_sigma1", harness::run_experiment(make(Experiment::clt, Model::br, 2, 4096, 1000)));
  auto c = make(Experiment::clt, Model::br, 2, 4096, 1000);
  c.h_spec = one_plus_s();
  add_report(o, "br_1+s", harness::run_experiment(c));
  return o;
}

Outcome local_time() {
  Outcome o;
  add_report(o, "max2bm",
             harness::run_experiment(make(Experiment::local_time, Model::max2bm, 2, 1 << 16, 10000)));
  return o;
}

Outcome truncation_audit() {
  Outcome o;
  add_report(o, "br", harness::run_experiment(make(Experiment::truncation_audit, Model::br, 2, 4096, 100)));
  auto c = make(Experiment::truncation_audit, Model::br, 2, 4096, 100);
  c.h_spec = one_plus_s();
  add_report(o, "br_1+s", harness::run_experiment(c));
  return o;
}

Outcome h_recovery() {
  Outcome o;
  auto c = make(Experiment::estimate_h, Model::br, 2, 1 << 16, 20);
  c.h_spec = one_plus_s();
  add_report(o, "br_1+s", harness::run_experiment(c));
  return o;
}

Outcome reproducibility() {
  Outcome o;
  std::vector<ExperimentConfig> configs;
  configs.push_back(make(Experiment::distributional, Model::br, 2, 256, 500));
  configs.push_back(make(Experiment::clt, Model::max2bm, 2, 1024, 200));
  auto h = make(Experiment::lln, Model::br, 2, 4096, 50);
  h.h_spec = one_plus_s();
  configs.push_back(h);
  configs.push_back(make(Experiment::local_time, Model::max2bm, 2, 4096, 200));
  for (const auto& c : configs) {
    const std::string a = harness::run_experiment(c).to_json(false).dump();
    const std::string b = harness::run_experiment(c).to_json(false).dump();
    const bool same = a == b;
    o.checks.push_back({harness::to_string(c.experiment) + "_byte_identical", same ? 1.0 : 0.0, "==",
                        1.0, same});
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact identities", exact_identities},
      {"moment-bias convergence", moment_bias},
      {"distributional facts", distributional},
      {"marginal increment law", marginal_increment},
      {"law of large numbers", lln},
      {"central limit theorem", clt},
      {"local-time estimators", local_time},
      {"truncation audit", truncation_audit},
      {"H recovery", h_recovery},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    std::string error;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = error.empty() && o.pass();
    failed += !pass;
    std::printf("criterion %2zu %-26s %s  (%.1f s)\n", i + 1, criteria[i].first.c_str(),
                pass ? "PASS" : "FAIL", secs);
    for (const auto& c : o.checks) {
      std::printf("    %-4s %-52s %.6g %s %.6g\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.measured,
                  c.comparison.c_str(), c.threshold);
    }
    if (!error.empty()) {
      std::printf("    error: %s\n", error.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
