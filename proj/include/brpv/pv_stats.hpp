#pragma once

// Path statistics: normalized power variation, local-time estimators, the
// crossing-restricted local-time bias functional, and a windowed estimate of H.

#include <vector>

#include "brpv/gauss_kernels.hpp"
#include "brpv/grid.hpp"
#include "brpv/path_sim.hpp"

namespace brpv::stats {

/// B(p, X)_t = n^{p/2 - 1} sum_{i=1}^{floor(nt) - 1} |X_{i/n} - X_{(i-1)/n}|^p.
double power_variation(const GridPath& path, int p, double t);

struct PVSeries {
  int p = 0;
  Grid grid{2};
  /// B(p, X)_{k/n}, k = 0..n.
  std::vector<double> values;
};

PVSeries power_variation_series(const GridPath& path, int p);

/// (1 / halfwidth) n^{-1/2} sum_{i=1}^{floor(nt) - 1} 1{|sqrt(n) X_{(i-1)/n}| <= halfwidth}.
/// Calibrated for a process with quadratic variation rate 2, e.g. W2 - W1.
double local_time_kernel(const GridPath& path, double t, double halfwidth);

/// |X_{floor(nt)/n}| - |X_0| - sum_{i <= floor(nt)} sign(X_{(i-1)/n}) dX_i, sign(0) = +1.
double local_time_tanaka(const GridPath& path, double t);

enum class LocalTimeMethod { kernel, tanaka };

struct LocalTimeEstimate {
  LocalTimeMethod method = LocalTimeMethod::kernel;
  std::vector<double> values;
  double kernel_halfwidth = 0.0;
};

LocalTimeEstimate local_time_kernel_series(const GridPath& path, double halfwidth);
LocalTimeEstimate local_time_tanaka_series(const GridPath& path);

/// lambda(phi_{p,sigma}) = sigma^{p+1} lambda(phi_{p,1}) from one quadrature.
class LambdaScaling {
 public:
  LambdaScaling(int p, double lambda_unit) : p_(p), lambda_unit_(lambda_unit) {}
  static LambdaScaling from_quadrature(int p, const kernels::QuadratureConfig& q = {});

  int p() const { return p_; }
  double unit() const { return lambda_unit_; }
  double at(double sigma) const;

 private:
  int p_;
  double lambda_unit_;
};

/// Sum over grid steps i in [i_begin, i_end) of the bias contribution at the
/// left endpoint (i - 1)/n: for every retained pair (j, k) that holds the top
/// two places there, lambda(phi_{p,H}) / (2 H^2) times the local-time increment
/// of Z_k - Z_j. The local-time increment is normalized by the pair's own
/// quadratic-variation rate 2 H^2, so the product is
/// lambda(phi_{p,H}) / (2 h sqrt(n)) 1{|sqrt(n)(Z_k - Z_j)| <= h}.
double clt_bias_functional_range(const sim::MaxStablePath& path, int p, std::int64_t i_begin,
                                 std::int64_t i_end, double halfwidth, const LambdaScaling& lambda);

/// Steps i = 1..floor(nt) - 1.
double clt_bias_functional(const sim::MaxStablePath& path, int p, double t, double halfwidth,
                           const LambdaScaling& lambda);

/// Constant-volatility form (lambda(phi_{p,sigma}) / (2 sigma^2)) sum_{j<k} int 1{..} dL,
/// with the local time estimated as sigma^2 / (h sqrt(n)) times the crossing count.
double clt_bias_functional_constant(const sim::MaxStablePath& path, int p, double t,
                                    double halfwidth, double sigma, double lambda_sigma);

struct HEstimate {
  GridPath h_hat;
  /// True where the window was clipped by an end of [0, 1].
  std::vector<bool> edge_truncated;
};

/// Centred sliding window of `window` increments; H_hat(t)^p =
/// n^{p/2} / (count m_p) sum |dX|^p over the increments in the window.
HEstimate estimate_h(const GridPath& path, int p, std::int64_t window);

}  // namespace brpv::stats
