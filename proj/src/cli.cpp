#include "brpv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "brpv/csv.hpp"
#include "brpv/gauss_kernels.hpp"
#include "brpv/increment_law.hpp"
#include "brpv/mc_harness.hpp"
#include "brpv/path_sim.hpp"
#include "brpv/pv_stats.hpp"

namespace brpv::cli {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kPrecedence =
    "Settings are resolved as: command-line flag, then the --config JSON file "
    "(keys are flag names with '-' replaced by '_'), then built-in defaults.";

// Flag values override config values, which override defaults.
class Settings {
 public:
  Settings() = default;
  Settings(const std::optional<std::string>& config_path, std::set<std::string> allowed) {
    if (!config_path) {
      return;
    }
    std::ifstream in(*config_path);
    if (!in) {
      throw UsageError("cannot open config file '" + *config_path + "'");
    }
    try {
      config_ = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!config_.is_object()) {
      throw UsageError("config file must hold a JSON object");
    }
    for (const auto& [k, v] : config_.items()) {
      if (!allowed.count(k)) {
        throw UsageError("unknown config key '" + k + "'");
      }
    }
  }

  template <class T>
  std::optional<T> get(const std::string& key, const std::optional<T>& flag) const {
    if (flag) {
      return flag;
    }
    if (config_.contains(key)) {
      try {
        return config_.at(key).get<T>();
      } catch (const json::exception& e) {
        throw UsageError("config key '" + key + "' has the wrong type");
      }
    }
    return std::nullopt;
  }

  template <class T>
  T get(const std::string& key, const std::optional<T>& flag, T fallback) const {
    return get(key, flag).value_or(fallback);
  }

  template <class T>
  T require(const std::string& key, const std::optional<T>& flag) const {
    const auto v = get(key, flag);
    if (!v) {
      throw UsageError("missing required setting --" + dashed(key));
    }
    return *v;
  }

  const json& raw() const { return config_; }

 private:
  static std::string dashed(std::string s) {
    for (char& c : s) {
      if (c == '_') {
        c = '-';
      }
    }
    return s;
  }

  json config_ = json::object();
};

// Writes to --out when given, else to the provided stream.
class Sink {
 public:
  Sink(const std::optional<std::string>& path, std::ostream& fallback) : stream_(&fallback) {
    if (path) {
      file_.open(*path);
      if (!file_) {
        throw UsageError("cannot open output file '" + *path + "'");
      }
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct Common {
  std::optional<std::string> config;
  std::optional<std::string> out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON file with default settings");
  sub->add_option("--out", c.out, "Output path (default: standard output)");
}

// ---------------------------------------------------------------------------

struct KernelArgs {
  Common common;
  std::optional<int> p;
  std::optional<double> sigma;
  std::optional<int> points;
  std::optional<double> w_min;
  std::optional<double> w_max;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<int> max_subdivisions;
  std::optional<double> tail_cutoff;
};

int tabulate_kernels(const KernelArgs& a, std::ostream& out) {
  const Settings s(a.common.config, {"p", "sigma", "points", "w_min", "w_max", "abs_tol", "rel_tol",
                                     "max_subdivisions", "tail_cutoff", "out"});
  kernels::QuadratureConfig q;
  q.abs_tol = s.get("abs_tol", a.abs_tol, q.abs_tol);
  q.rel_tol = s.get("rel_tol", a.rel_tol, q.rel_tol);
  q.max_subdivisions = s.get("max_subdivisions", a.max_subdivisions, q.max_subdivisions);
  q.tail_cutoff = s.get("tail_cutoff", a.tail_cutoff, q.tail_cutoff);
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const int p = s.require("p", a.p);
  const double sigma = s.get("sigma", a.sigma, 1.0);
  const int points = s.get("points", a.points, 201);
  if (p < 1 || !(sigma > 0.0) || points < 2) {
    throw UsageError("need p >= 1, sigma > 0 and at least two points");
  }
  const auto w_min = s.get("w_min", a.w_min);
  const auto w_max = s.get("w_max", a.w_max);
  kernels::KernelTable table = [&] {
    if (w_min || w_max) {
      const double half = kernels::kernel_support_halfwidth(p, sigma, q);
      const double lo = w_min.value_or(-half);
      const double hi = w_max.value_or(half);
      if (!(lo < hi)) {
        throw UsageError("need w-min < w-max");
      }
      std::vector<double> grid(static_cast<std::size_t>(points));
      for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
      }
      return kernels::KernelTable::build(p, sigma, std::move(grid), q);
    }
    return kernels::KernelTable::build(p, sigma, points, q);
  }();
  Sink sink(s.get("out", a.common.out), out);
  table.write_csv(*sink);
  return kOk;
}

// ---------------------------------------------------------------------------

struct IncrementArgs {
  Common common;
  std::optional<int> p;
  std::optional<double> sigma;
  std::optional<std::int64_t> n;
  std::optional<double> eta;
  std::optional<double> u_min;
  std::optional<double> u_max;
  std::optional<int> points;
};

int tabulate_increment_law(const IncrementArgs& a, std::ostream& out) {
  const Settings s(a.common.config, {"p", "sigma", "n", "eta", "u_min", "u_max", "points", "out"});
  increment::IncrementLawParams law{s.get("sigma", a.sigma, 1.0), s.require("n", a.n)};
  const int p = s.get("p", a.p, 2);
  const double eta = s.get("eta", a.eta, 1.0);
  const double lo = s.get("u_min", a.u_min, -6.0);
  const double hi = s.get("u_max", a.u_max, 6.0);
  const int points = s.get("points", a.points, 241);
  try {
    law.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(eta > 0.0) || !(lo < hi) || points < 2 || p < 1) {
    throw UsageError("need eta > 0, u-min < u-max, p >= 1 and at least two points");
  }
  const Estimate moment = increment::exact_abs_moment(p, law);
  Sink sink(s.get("out", a.common.out), out);
  *sink << "# sigma=" << csv::format_double(law.sigma) << " n=" << law.n << " p=" << p
        << " eta=" << csv::format_double(eta)
        << " exact_abs_moment=" << csv::format_double(moment.value)
        << " exact_abs_moment_err=" << csv::format_double(moment.error) << '\n';
  *sink << "u,marginal_cdf,cond_cdf\n";
  for (int i = 0; i < points; ++i) {
    const double u = lo + (hi - lo) * i / (points - 1);
    *sink << csv::format_double(u) << ',' << csv::format_double(increment::marginal_cdf(u, law))
          << ',' << csv::format_double(increment::cond_cdf(u, eta, law)) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::optional<std::string> model;
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::optional<std::string> h_spec;
  std::optional<double> epsilon;
  std::optional<std::int64_t> atom_budget;
};

VolatilitySpec resolve_volatility(const Settings& s, const std::optional<double>& sigma_flag,
                                  const std::optional<std::string>& h_flag) {
  // A flag of either kind beats any config entry of either kind.
  if (sigma_flag && h_flag) {
    throw UsageError("give either --sigma or --h-spec, not both");
  }
  try {
    if (h_flag) {
      return harness::volatility_from_json(harness::resolve_h_spec(json(*h_flag)));
    }
    if (sigma_flag) {
      return VolatilitySpec::constant(*sigma_flag);
    }
    if (s.raw().contains("h_spec") && s.raw().contains("sigma")) {
      throw UsageError("config gives both sigma and h_spec");
    }
    if (s.raw().contains("h_spec")) {
      return harness::volatility_from_json(harness::resolve_h_spec(s.raw().at("h_spec")));
    }
    return VolatilitySpec::constant(s.get<double>("sigma", std::nullopt, 1.0));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const json::exception& e) {
    throw UsageError(e.what());
  }
}

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const Settings s(a.common.config, {"model", "n", "reps", "seed", "sigma", "h_spec", "epsilon",
                                     "atom_budget", "out"});
  harness::Model model;
  try {
    model = harness::parse_model(s.get<std::string>("model", a.model, "br"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::int64_t n = s.require("n", a.n);
  const std::int64_t reps = s.get<std::int64_t>("reps", a.reps, 1);
  const std::uint64_t seed = s.get<std::uint64_t>("seed", a.seed, 20261016);
  const double epsilon = s.get("epsilon", a.epsilon, 1e-3);
  const std::int64_t budget = s.get<std::int64_t>("atom_budget", a.atom_budget, 1'000'000);
  if (n < 2 || reps < 1 || !(epsilon > 0.0 && epsilon <= 0.01) || budget < 2) {
    throw UsageError("need n >= 2, reps >= 1, epsilon in (0, 0.01] and atom-budget >= 2");
  }
  const VolatilitySpec h = resolve_volatility(s, a.sigma, a.h_spec);
  const Grid grid(n);
  Sink sink(s.get("out", a.common.out), out);
  std::ostream& os = *sink;
  os << (model == harness::Model::br ? "replicate,i,t,value,argmax_atom\n" : "replicate,i,t,value\n");
  for (std::int64_t r = 0; r < reps; ++r) {
    const rng::Stream stream(seed, static_cast<std::uint64_t>(r));
    if (model == harness::Model::max2bm) {
      const auto paths = sim::sample_max_two_bm(grid, stream);
      for (std::int64_t i = 0; i <= n; ++i) {
        os << r << ',' << i << ',' << csv::format_double(grid.time(i)) << ','
           << csv::format_double(paths.maximum.values[static_cast<std::size_t>(i)]) << '\n';
      }
      continue;
    }
    const auto path = sim::sample_brown_resnick(h, grid, stream, {epsilon, budget});
    for (std::int64_t i = 0; i <= n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      os << r << ',' << i << ',' << csv::format_double(grid.time(i)) << ','
         << csv::format_double(path.log_eta.values[k]) << ','
         << path.atoms[static_cast<std::size_t>(path.argmax_index[k])].generation << '\n';
    }
    err << "replicate " << r << ": " << path.truncation_diag.atoms_generated << " atoms, "
        << path.atoms.size() << " retained\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

// Paths keyed by replicate, read from a simulate CSV.
std::map<std::int64_t, GridPath> read_paths(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open input file '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw UsageError("input file is empty");
  }
  const auto header = csv::split(line);
  if (header.size() < 4 || header[0] != "replicate" || header[1] != "i" || header[3] != "value") {
    throw UsageError("input must have columns replicate,i,t,value[,argmax_atom]");
  }
  std::map<std::int64_t, std::vector<double>> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    const auto f = csv::split(line);
    if (f.size() != header.size()) {
      throw UsageError("row " + std::to_string(row) + " has the wrong number of fields");
    }
    try {
      const auto r = csv::parse_int(f[0]);
      const auto i = csv::parse_int(f[1]);
      auto& v = values[r];
      if (i != static_cast<long long>(v.size())) {
        throw UsageError("row " + std::to_string(row) + ": grid index out of sequence");
      }
      v.push_back(csv::parse_double(f[3]));
    } catch (const std::invalid_argument& e) {
      throw UsageError("row " + std::to_string(row) + ": " + e.what());
    }
  }
  std::map<std::int64_t, GridPath> out;
  for (auto& [r, v] : values) {
    if (v.size() < 3) {
      throw UsageError("replicate " + std::to_string(r) + " has fewer than three grid points");
    }
    const Grid grid(static_cast<std::int64_t>(v.size()) - 1);
    try {
      out.emplace(r, GridPath(grid, std::move(v)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

struct PowervarArgs {
  Common common;
  std::optional<std::string> in;
  std::optional<int> p;
  std::optional<double> t;
};

int powervar(const PowervarArgs& a, std::ostream& out) {
  const Settings s(a.common.config, {"in", "p", "t", "out"});
  const std::string in = s.require("in", a.in);
  const int p = s.require("p", a.p);
  const double t = s.get("t", a.t, 1.0);
  if (p < 1 || !(t >= 0.0 && t <= 1.0)) {
    throw UsageError("need p >= 1 and t in [0, 1]");
  }
  const auto paths = read_paths(in);
  Sink sink(s.get("out", a.common.out), out);
  *sink << "replicate,t,B\n";
  for (const auto& [r, path] : paths) {
    *sink << r << ',' << csv::format_double(t) << ','
          << csv::format_double(stats::power_variation(path, p, t)) << '\n';
  }
  return kOk;
}

struct EstimateHArgs {
  Common common;
  std::optional<std::string> in;
  std::optional<int> p;
  std::optional<std::int64_t> window;
  std::optional<std::int64_t> replicate;
};

int estimate_h(const EstimateHArgs& a, std::ostream& out) {
  const Settings s(a.common.config, {"in", "p", "window", "replicate", "out"});
  const std::string in = s.require("in", a.in);
  const int p = s.require("p", a.p);
  const std::int64_t window = s.require("window", a.window);
  const auto paths = read_paths(in);
  const std::int64_t rep = s.get<std::int64_t>("replicate", a.replicate, paths.begin()->first);
  const auto it = paths.find(rep);
  if (it == paths.end()) {
    throw UsageError("replicate " + std::to_string(rep) + " not found in input");
  }
  stats::HEstimate est = [&] {
    try {
      return stats::estimate_h(it->second, p, window);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }();
  Sink sink(s.get("out", a.common.out), out);
  *sink << "t,H_hat,edge_truncated\n";
  const Grid& grid = est.h_hat.grid;
  for (std::int64_t k = 0; k <= grid.n(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    *sink << csv::format_double(grid.time(k)) << ',' << csv::format_double(est.h_hat.values[idx])
          << ',' << (est.edge_truncated[idx] ? 1 : 0) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::optional<std::string> experiment;
  std::optional<std::string> model;
  std::optional<int> p;
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> reps;
  std::optional<double> sigma;
  std::optional<std::string> h_spec;
  std::optional<double> epsilon;
  std::optional<std::int64_t> atom_budget;
  std::optional<double> halfwidth;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_eval;
  std::optional<std::int64_t> window;
  std::optional<int> k_fold;
};

int verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  json j = json::object();
  if (a.common.config) {
    std::ifstream in(*a.common.config);
    if (!in) {
      throw UsageError("cannot open config file '" + *a.common.config + "'");
    }
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) {
      throw UsageError("config file must hold a JSON object");
    }
  }
  auto put = [&](const char* key, const auto& flag) {
    if (flag) {
      j[key] = *flag;
    }
  };
  put("experiment", a.experiment);
  put("model", a.model);
  put("p", a.p);
  put("n", a.n);
  put("reps", a.reps);
  put("epsilon", a.epsilon);
  put("atom_budget", a.atom_budget);
  put("halfwidth", a.halfwidth);
  put("t_eval", a.t_eval);
  put("window", a.window);
  put("k_fold", a.k_fold);
  if (a.seed) {
    j.erase("seed");
    j["master_seed"] = *a.seed;
  }
  if (a.sigma && a.h_spec) {
    throw UsageError("give either --sigma or --h-spec, not both");
  }
  if (a.sigma) {
    j.erase("h_spec");
    j["sigma"] = *a.sigma;
  }
  if (a.h_spec) {
    j["h_spec"] = *a.h_spec;
  }
  if (!j.contains("experiment")) {
    throw UsageError("missing required setting --experiment");
  }
  harness::ExperimentConfig config;
  try {
    config = harness::ExperimentConfig::from_json(j);
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const harness::ExperimentReport report = harness::run_experiment(config);
  {
    Sink sink(a.common.out, out);
    *sink << report.to_json().dump(2) << '\n';
  }
  for (const auto& v : report.verdicts) {
    err << (v.pass ? "PASS " : "FAIL ") << v.name << ": measured " << v.measured << ' '
        << v.comparison << ' ' << v.threshold << '\n';
  }
  if (!report.truncation_failures.empty()) {
    err << report.truncation_failures.size() << " replicate(s) exhausted the atom budget\n";
    return kNumerical;
  }
  return report.all_pass() ? kOk : kVerdictFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification workbench for power variations of Brown-Resnick "
               "max-stable processes"};
  app.footer(kPrecedence);
  app.require_subcommand(1);

  KernelArgs ka;
  auto* k = app.add_subcommand("tabulate-kernels", "Tabulate phi, phi2 and their integrals as CSV");
  add_common(k, ka.common);
  k->add_option("--p", ka.p, "Power p (required)");
  k->add_option("--sigma", ka.sigma, "Spectral volatility (default 1)");
  k->add_option("--points", ka.points, "Number of w grid points (default 201)");
  k->add_option("--w-min", ka.w_min, "Lower end of the w grid (default: kernel support)");
  k->add_option("--w-max", ka.w_max, "Upper end of the w grid (default: kernel support)");
  k->add_option("--abs-tol", ka.abs_tol, "Absolute quadrature tolerance (default 1e-9)");
  k->add_option("--rel-tol", ka.rel_tol, "Relative quadrature tolerance (default 1e-8)");
  k->add_option("--max-subdivisions", ka.max_subdivisions, "Subdivision budget (default 2000)");
  k->add_option("--tail-cutoff", ka.tail_cutoff, "Gaussian truncation in sd (default 8)");

  IncrementArgs ia;
  auto* inc = app.add_subcommand("tabulate-increment-law",
                                 "Tabulate the marginal and conditional increment CDFs as CSV");
  add_common(inc, ia.common);
  inc->add_option("--p", ia.p, "Order of the exact absolute moment in the header (default 2)");
  inc->add_option("--sigma", ia.sigma, "Volatility (default 1)");
  inc->add_option("--n", ia.n, "Grid frequency (required)");
  inc->add_option("--eta", ia.eta, "Conditioning value for cond_cdf (default 1)");
  inc->add_option("--u-min", ia.u_min, "Lower end of the u grid (default -6)");
  inc->add_option("--u-max", ia.u_max, "Upper end of the u grid (default 6)");
  inc->add_option("--points", ia.points, "Number of u grid points (default 241)");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate paths and write replicate,i,t,value CSV");
  add_common(sim, sa.common);
  sim->add_option("--model", sa.model, "max2bm or br (default br)");
  sim->add_option("--n", sa.n, "Grid frequency (required)");
  sim->add_option("--reps", sa.reps, "Number of replicates (default 1)");
  sim->add_option("--seed", sa.seed, "Master seed (default 20261016)");
  sim->add_option("--sigma", sa.sigma, "Constant volatility (default 1)");
  sim->add_option("--h-spec", sa.h_spec, "CSV table of (s, H_s) rows");
  sim->add_option("--epsilon", sa.epsilon, "Truncation probability (default 1e-3)");
  sim->add_option("--atom-budget", sa.atom_budget, "Maximum atoms per path (default 1e6)");

  PowervarArgs pa;
  auto* pv = app.add_subcommand("powervar", "Power variation of each path in a simulate CSV");
  add_common(pv, pa.common);
  pv->add_option("--in", pa.in, "Input CSV from simulate (required)");
  pv->add_option("--p", pa.p, "Power p (required)");
  pv->add_option("--t", pa.t, "Evaluation time (default 1)");

  EstimateHArgs ha;
  auto* eh = app.add_subcommand("estimate-h", "Windowed estimate of H from one path");
  add_common(eh, ha.common);
  eh->add_option("--in", ha.in, "Input CSV from simulate (required)");
  eh->add_option("--p", ha.p, "Power p (required)");
  eh->add_option("--window", ha.window, "Window length in increments (required)");
  eh->add_option("--replicate", ha.replicate, "Replicate to use (default: first in file)");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Run a Monte Carlo experiment and write a JSON report");
  add_common(ver, va.common);
  ver->add_option("--experiment", va.experiment,
                  "frechet|stationarity|maxstability|distributional|marginal_increment|"
                  "moment_bias|lln|clt|estimate_h|local_time|truncation_audit");
  ver->add_option("--model", va.model, "max2bm or br");
  ver->add_option("--p", va.p, "Power p");
  ver->add_option("--n", va.n, "Grid frequency (power of two)");
  ver->add_option("--reps", va.reps, "Replicates");
  ver->add_option("--sigma", va.sigma, "Constant volatility");
  ver->add_option("--h-spec", va.h_spec, "CSV table of (s, H_s) rows");
  ver->add_option("--epsilon", va.epsilon, "Truncation probability");
  ver->add_option("--atom-budget", va.atom_budget, "Maximum atoms per path");
  ver->add_option("--halfwidth", va.halfwidth, "Local-time kernel halfwidth");
  ver->add_option("--seed", va.seed, "Master seed");
  ver->add_option("--t-eval", va.t_eval, "Evaluation time");
  ver->add_option("--window", va.window, "estimate_h window");
  ver->add_option("--k-fold", va.k_fold, "Fold size for max-stability");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) {
      args.emplace_back(argv[i]);
    }
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*k) {
      return tabulate_kernels(ka, out);
    }
    if (*inc) {
      return tabulate_increment_law(ia, out);
    }
    if (*sim) {
      return simulate(sa, out, err);
    }
    if (*pv) {
      return powervar(pa, out);
    }
    if (*eh) {
      return estimate_h(ha, out);
    }
    if (*ver) {
      return verify(va, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n";
    for (auto* sub : app.get_subcommands()) {
      err << sub->help();
    }
    return kUsage;
  } catch (const QuadratureFailure& e) {
    err << "numerical failure: " << e.what() << " (best estimate " << e.best().value << " +- "
        << e.best().error << ")\n";
    return kNumerical;
  } catch (const sim::TruncationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const harness::InsufficientReplicates& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace brpv::cli
