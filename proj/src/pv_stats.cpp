#include "brpv/pv_stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace brpv::stats {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) {
    r *= x;
  }
  return r;
}

void require_p(int p) {
  if (p < 1) {
    throw std::domain_error("power variation: p must be a positive integer");
  }
}

void require_halfwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::domain_error("local time: halfwidth must be positive");
  }
}

double sqrt_n(const Grid& g) { return std::sqrt(static_cast<double>(g.n())); }

}  // namespace

double power_variation(const GridPath& path, int p, double t) {
  require_p(p);
  const std::int64_t last = path.grid.index_of(t) - 1;
  double sum = 0.0;
  for (std::int64_t i = 1; i <= last; ++i) {
    sum += ipow(std::abs(path.increment(i)), p);
  }
  return std::pow(static_cast<double>(path.grid.n()), 0.5 * p - 1.0) * sum;
}

PVSeries power_variation_series(const GridPath& path, int p) {
  require_p(p);
  PVSeries out{p, path.grid, std::vector<double>(path.grid.size(), 0.0)};
  const double scale = std::pow(static_cast<double>(path.grid.n()), 0.5 * p - 1.0);
  double sum = 0.0;
  // values[k] sums increments 1..k-1.
  for (std::int64_t k = 2; k <= path.grid.n(); ++k) {
    sum += ipow(std::abs(path.increment(k - 1)), p);
    out.values[static_cast<std::size_t>(k)] = scale * sum;
  }
  return out;
}

double local_time_kernel(const GridPath& path, double t, double halfwidth) {
  require_halfwidth(halfwidth);
  const std::int64_t last = path.grid.index_of(t) - 1;
  const double rn = sqrt_n(path.grid);
  std::int64_t count = 0;
  for (std::int64_t i = 1; i <= last; ++i) {
    if (std::abs(rn * path.values[static_cast<std::size_t>(i - 1)]) <= halfwidth) {
      ++count;
    }
  }
  return static_cast<double>(count) / (halfwidth * rn);
}

double local_time_tanaka(const GridPath& path, double t) {
  const std::int64_t last = path.grid.index_of(t);
  double signed_sum = 0.0;
  for (std::int64_t i = 1; i <= last; ++i) {
    const double left = path.values[static_cast<std::size_t>(i - 1)];
    signed_sum += (left >= 0.0 ? 1.0 : -1.0) * path.increment(i);
  }
  return std::abs(path.values[static_cast<std::size_t>(last)]) - std::abs(path.values[0]) -
         signed_sum;
}

LocalTimeEstimate local_time_kernel_series(const GridPath& path, double halfwidth) {
  require_halfwidth(halfwidth);
  LocalTimeEstimate out{LocalTimeMethod::kernel, std::vector<double>(path.grid.size(), 0.0),
                        halfwidth};
  const double rn = sqrt_n(path.grid);
  std::int64_t count = 0;
  for (std::int64_t k = 2; k <= path.grid.n(); ++k) {
    if (std::abs(rn * path.values[static_cast<std::size_t>(k - 2)]) <= halfwidth) {
      ++count;
    }
    out.values[static_cast<std::size_t>(k)] = static_cast<double>(count) / (halfwidth * rn);
  }
  return out;
}

LocalTimeEstimate local_time_tanaka_series(const GridPath& path) {
  LocalTimeEstimate out{LocalTimeMethod::tanaka, std::vector<double>(path.grid.size(), 0.0), 0.0};
  double signed_sum = 0.0;
  for (std::int64_t k = 1; k <= path.grid.n(); ++k) {
    const double left = path.values[static_cast<std::size_t>(k - 1)];
    signed_sum += (left >= 0.0 ? 1.0 : -1.0) * path.increment(k);
    out.values[static_cast<std::size_t>(k)] =
        std::abs(path.values[static_cast<std::size_t>(k)]) - std::abs(path.values[0]) - signed_sum;
  }
  return out;
}

LambdaScaling LambdaScaling::from_quadrature(int p, const kernels::QuadratureConfig& q) {
  return LambdaScaling(p, kernels::lambda_integral(p, 1.0, kernels::KernelKind::phi, q).value);
}

double LambdaScaling::at(double sigma) const { return ipow(sigma, p_ + 1) * lambda_unit_; }

namespace {

void require_atoms(const sim::MaxStablePath& path) {
  if (path.atoms.size() < 2) {
    throw std::invalid_argument("clt_bias_functional: need at least two retained atoms");
  }
}

// Positions in path.atoms of the top two Z values at grid point k.
std::pair<std::size_t, std::size_t> top_pair(const sim::MaxStablePath& path, std::size_t k) {
  std::size_t best = 0;
  std::size_t runner = 1;
  const auto z = [&](std::size_t a) { return path.atoms[a].z_path.values[k]; };
  if (z(runner) > z(best)) {
    std::swap(best, runner);
  }
  for (std::size_t a = 2; a < path.atoms.size(); ++a) {
    if (z(a) > z(best)) {
      runner = best;
      best = a;
    } else if (z(a) > z(runner)) {
      runner = a;
    }
  }
  return {best, runner};
}

std::int64_t crossing_count(const sim::MaxStablePath& path, std::int64_t i_begin,
                            std::int64_t i_end, double halfwidth,
                            std::vector<std::int64_t>* steps) {
  const double rn = std::sqrt(static_cast<double>(path.log_eta.grid.n()));
  std::int64_t count = 0;
  for (std::int64_t i = i_begin; i < i_end; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    const auto [j, m] = top_pair(path, k);
    const double gap = path.atoms[j].z_path.values[k] - path.atoms[m].z_path.values[k];
    if (std::abs(rn * gap) <= halfwidth) {
      ++count;
      if (steps != nullptr) {
        steps->push_back(i);
      }
    }
  }
  return count;
}

}  // namespace

double clt_bias_functional_range(const sim::MaxStablePath& path, int p, std::int64_t i_begin,
                                 std::int64_t i_end, double halfwidth,
                                 const LambdaScaling& lambda) {
  require_p(p);
  require_halfwidth(halfwidth);
  require_atoms(path);
  if (lambda.p() != p) {
    throw std::invalid_argument("clt_bias_functional: lambda scaling built for a different p");
  }
  const Grid& grid = path.log_eta.grid;
  if (i_begin < 1 || i_end > grid.n() + 1 || i_begin > i_end) {
    throw std::domain_error("clt_bias_functional: step range out of bounds");
  }
  const double rn = std::sqrt(static_cast<double>(grid.n()));
  std::vector<std::int64_t> steps;
  crossing_count(path, i_begin, i_end, halfwidth, &steps);
  double sum = 0.0;
  for (std::int64_t i : steps) {
    const double hs = path.volatility(grid.time(i - 1));
    const double lam = lambda.at(hs);
    // (lambda / (2 H^2)) * (H^2 / (h sqrt(n))) with the H^2 factors cancelled.
    sum += lam / (2.0 * halfwidth * rn);
  }
  return sum;
}

double clt_bias_functional(const sim::MaxStablePath& path, int p, double t, double halfwidth,
                           const LambdaScaling& lambda) {
  const std::int64_t last = path.log_eta.grid.index_of(t) - 1;
  return clt_bias_functional_range(path, p, 1, std::max<std::int64_t>(last + 1, 1), halfwidth,
                                   lambda);
}

double clt_bias_functional_constant(const sim::MaxStablePath& path, int p, double t,
                                    double halfwidth, double sigma, double lambda_sigma) {
  require_p(p);
  require_halfwidth(halfwidth);
  require_atoms(path);
  if (!(sigma > 0.0)) {
    throw std::domain_error("clt_bias_functional_constant: sigma must be positive");
  }
  const Grid& grid = path.log_eta.grid;
  const std::int64_t last = grid.index_of(t) - 1;
  const std::int64_t count =
      crossing_count(path, 1, std::max<std::int64_t>(last + 1, 1), halfwidth, nullptr);
  const double rn = std::sqrt(static_cast<double>(grid.n()));
  const double local_time = sigma * sigma * static_cast<double>(count) / (halfwidth * rn);
  return lambda_sigma / (2.0 * sigma * sigma) * local_time;
}

HEstimate estimate_h(const GridPath& path, int p, std::int64_t window) {
  require_p(p);
  const std::int64_t n = path.grid.n();
  if (window < 16 || window > n / 4) {
    throw std::domain_error("estimate_h: window must lie in [16, n/4]");
  }
  std::vector<double> powered(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t i = 1; i <= n; ++i) {
    powered[static_cast<std::size_t>(i)] = ipow(std::abs(path.increment(i)), p);
    prefix[static_cast<std::size_t>(i)] =
        prefix[static_cast<std::size_t>(i - 1)] + powered[static_cast<std::size_t>(i)];
  }
  const double scale = std::pow(static_cast<double>(n), 0.5 * p) / kernels::abs_moment(p);
  HEstimate out{GridPath(path.grid), std::vector<bool>(path.grid.size(), false)};
  const std::int64_t half = window / 2;
  for (std::int64_t k = 0; k <= n; ++k) {
    // Increments i in [k - half + 1, k - half + window], clipped to [1, n].
    const std::int64_t want_lo = k - half + 1;
    const std::int64_t want_hi = want_lo + window - 1;
    const std::int64_t lo = std::max<std::int64_t>(want_lo, 1);
    const std::int64_t hi = std::min<std::int64_t>(want_hi, n);
    const double sum =
        prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo - 1)];
    const double value = std::pow(scale * sum / static_cast<double>(hi - lo + 1), 1.0 / p);
    // Guards the strict positivity contract on degenerate (flat) inputs.
    out.h_hat.values[static_cast<std::size_t>(k)] =
        value > 0.0 ? value : std::numeric_limits<double>::min();
    out.edge_truncated[static_cast<std::size_t>(k)] = (lo != want_lo) || (hi != want_hi);
  }
  return out;
}

}  // namespace brpv::stats
