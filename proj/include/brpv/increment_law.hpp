#pragma once

// Exact finite-n law of the normalized increment U = sqrt(n) sigma^{-1}
// (log eta_{i/n} - log eta_{(i-1)/n}) of the stationary log-process with
// constant volatility sigma.

#include <cstdint>
#include <vector>

#include "brpv/gauss_kernels.hpp"
#include "brpv/quadrature.hpp"
#include "brpv/rng.hpp"

namespace brpv::increment {

struct IncrementLawParams {
  double sigma = 1.0;
  std::int64_t n = 1;

  /// a = sigma / (2 sqrt(n)).
  double half_step() const;
  /// Throws std::invalid_argument on sigma <= 0 or n < 1.
  void validate() const;
};

/// e^{-sigma u/sqrt(n)} (1 - Phi(u - a)), via the Mills ratio for u - a > 8.
double tail_term(double u, const IncrementLawParams& params);

/// P(U <= u | eta_{(i-1)/n} = eta).
double cond_cdf(double u, double eta, const IncrementLawParams& params);

/// P(U <= u) = Phi(u+a) / (Phi(u+a) + e^{-sigma u/sqrt(n)} (1 - Phi(u-a))).
double marginal_cdf(double u, const IncrementLawParams& params);

/// E|U|^p - m_p, integrated directly so that the small difference does not
/// cancel.
Estimate exact_abs_moment_gap(double p, const IncrementLawParams& params,
                              const kernels::QuadratureConfig& q = {});

/// E|U|^p = 2p int_0^inf u^{p-1} P(U > u) du.
Estimate exact_abs_moment(double p, const IncrementLawParams& params,
                          const kernels::QuadratureConfig& q = {});

/// Inverse-CDF draw for a uniform v in (0, 1); bisection on [-40, 40].
double quantile(double v, const IncrementLawParams& params);

/// `count` i.i.d. draws using the stream's uniform sequence.
std::vector<double> sample_increment(const IncrementLawParams& params, std::size_t count,
                                     rng::Stream& stream);

}  // namespace brpv::increment
