#pragma once

// Deterministic quadrature for the Gaussian functionals behind the power
// variation limit theorems: absolute moments m_p, the two-sided crossing
// kernel Psi, its Gaussian averages phi_{p,sigma} and phi^{(2)}_{p,sigma},
// their integrals lambda(.) over w, and the moment-bias integral J_p.

#include <iosfwd>
#include <vector>

#include "brpv/quadrature.hpp"

namespace brpv::kernels {

struct QuadratureConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  /// Half-width, in standard deviations, of the truncated Gaussian domain.
  double tail_cutoff = 8.0;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  AdaptiveTolerance tolerance() const { return {abs_tol, rel_tol, max_subdivisions}; }
};

enum class KernelKind { phi, phi2 };

/// m_p = E|N(0,1)|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi). Requires p >= 1.
double abs_moment(double p);

/// Psi_{|.|^p}(x, y, w): the correction to f(increment of the maximum) when
/// the leading component switches inside the step.
double psi(int p, double x, double y, double w);

/// psi(p, sigma*x, sigma*y, w).
double psi_sigma(int p, double sigma, double x, double y, double w);

/// phi_{p,sigma}(w) = E[Psi(sigma X, sigma Y, w)], X, Y iid N(0,1).
Estimate phi_kernel(int p, double sigma, double w, const QuadratureConfig& q = {});

/// phi^{(2)}_{p,sigma}(w) = E[Psi(sigma X, sigma Y, w)^2].
Estimate phi2_kernel(int p, double sigma, double w, const QuadratureConfig& q = {});

/// Same object as phi_kernel(p, sigma, w) but evaluated through the generic
/// psi_sigma integrand with its arguments exchanged, E[Psi(sigma Y, sigma X, -w)].
/// Used to cross-check the specialised branch integrands.
Estimate phi_kernel_swapped(int p, double sigma, double w, const QuadratureConfig& q = {});

/// Beyond this |w| the selected kernel is provably below abs_tol (or the
/// truncated Gaussian domain ends).
double kernel_support_halfwidth(int p, double sigma, const QuadratureConfig& q = {});

/// lambda(phi_{p,sigma}) or lambda(phi^{(2)}_{p,sigma}).
Estimate lambda_integral(int p, double sigma, KernelKind which, const QuadratureConfig& q = {});

/// The bracket 1/2 - Phibar(u) - u Phibar(u) Phi(u) / phi(u) in the
/// moment-bias integrand, in Mills-ratio form.
double bias_bracket(double u);

/// Integrand of J_p at u >= 0: 2p u^{p-1} phi(u) bias_bracket(u).
double bias_integrand(int p, double u);

/// J_p = 2p int_0^inf u^{p-1} phi(u) [1/2 - Phibar(u) - u Phibar(u)Phi(u)/phi(u)] du.
Estimate bias_integral(int p, const QuadratureConfig& q = {});

/// Tabulated phi_{p,sigma} and phi^{(2)}_{p,sigma} on a w grid, with their
/// integrals. Immutable once built.
class KernelTable {
 public:
  /// Grid of `points` equispaced w values spanning the kernel support.
  static KernelTable build(int p, double sigma, int points, const QuadratureConfig& q = {});
  static KernelTable build(int p, double sigma, std::vector<double> w_grid,
                           const QuadratureConfig& q = {});

  int p() const { return p_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& w_grid() const { return w_; }
  const std::vector<double>& phi_values() const { return phi_; }
  const std::vector<double>& phi2_values() const { return phi2_; }
  const std::vector<double>& phi_errors() const { return phi_err_; }
  Estimate lambda_phi() const { return lambda_phi_; }
  Estimate lambda_phi2() const { return lambda_phi2_; }
  const QuadratureConfig& config() const { return q_; }

  /// CSV: one '#' comment row with the parameters, then w,phi,phi2 rows.
  void write_csv(std::ostream& os) const;

 private:
  KernelTable() = default;
  int p_ = 0;
  double sigma_ = 0.0;
  std::vector<double> w_;
  std::vector<double> phi_;
  std::vector<double> phi2_;
  std::vector<double> phi_err_;
  Estimate lambda_phi_;
  Estimate lambda_phi2_;
  QuadratureConfig q_;
};

}  // namespace brpv::kernels
