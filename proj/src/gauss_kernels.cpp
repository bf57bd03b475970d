#include "brpv/gauss_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "brpv/csv.hpp"
#include "brpv/special.hpp"

namespace brpv::kernels {

namespace {

double ipow(double base, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) {
    r *= base;
  }
  return r;
}

double abs_pow(double v, int p) { return ipow(std::abs(v), p); }

void require_positive_p(int p, const char* who) {
  if (p < 1) {
    throw std::domain_error(std::string(who) + ": p must be a positive integer");
  }
}

void require_positive_sigma(double sigma, const char* who) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error(std::string(who) + ": sigma must be positive and finite");
  }
}

// Outer breakpoints clipped to [lo, hi], always including the ends.
std::vector<double> clipped_breaks(double lo, double hi, std::initializer_list<double> kinks) {
  std::vector<double> b{lo};
  for (double k : kinks) {
    if (k > lo && k < hi) {
      b.push_back(k);
    }
  }
  b.push_back(hi);
  std::sort(b.begin(), b.end());
  return b;
}

enum class Side { below, above };

// Integral of g(x, y) phi(x) phi(y) over the part of [-T, T]^2 where
// x - y <= c (Side::below: outer variable y, inner x) or x - y >= c
// (Side::above: outer variable x, inner y). `outer_kink` is the single
// interior point where the outer integrand loses smoothness; the inner
// integrand is only allowed to kink at 0.
template <class G>
Estimate integrate_wedge(const G& g, double c, Side side, double outer_kink,
                         const QuadratureConfig& q, double abs_tol, double rel_tol) {
  const double t = q.tail_cutoff;
  // below: x in [-T, min(T, y + c)], nonempty iff y > -T - c.
  // above: y in [-T, min(T, x - c)], nonempty iff x > -T + c.
  const double shift = side == Side::below ? c : -c;
  const double outer_lo = std::max(-t, -t - shift);
  const double outer_hi = t;
  if (!(outer_lo < outer_hi)) {
    return {};
  }
  // The outer integral can cancel almost completely (phi vanishes at w = 0),
  // so the inner relative tolerance is kept well below the outer one.
  const AdaptiveTolerance inner_tol{abs_tol / (4.0 * t), rel_tol * 1e-3, q.max_subdivisions};
  const AdaptiveTolerance outer_tol{abs_tol, rel_tol, q.max_subdivisions};

  auto outer = [&](double u) -> Estimate {
    const double inner_hi = std::min(t, u + shift);
    if (!(inner_hi > -t)) {
      return {};
    }
    const std::vector<double> ib = clipped_breaks(-t, inner_hi, {0.0});
    Estimate in;
    if (side == Side::below) {
      in = integrate_adaptive([&](double x) { return g(x, u) * normal_pdf(x); },
                              std::span<const double>(ib), inner_tol);
    } else {
      in = integrate_adaptive([&](double y) { return g(u, y) * normal_pdf(y); },
                              std::span<const double>(ib), inner_tol);
    }
    const double w = normal_pdf(u);
    return {in.value * w, in.error * w};
  };
  const std::vector<double> ob = clipped_breaks(outer_lo, outer_hi, {outer_kink});
  return integrate_adaptive(outer, std::span<const double>(ob), outer_tol);
}

Estimate add(const Estimate& a, const Estimate& b) { return {a.value + b.value, a.error + b.error}; }

template <bool Squared>
Estimate kernel_impl(int p, double sigma, double w, const QuadratureConfig& q, double abs_tol,
                     double rel_tol) {
  const double c = w / sigma;
  Estimate total;
  // Only one indicator branch is active unless w == 0; split the tolerance
  // across the two branches in that case.
  const double share = (w == 0.0) ? 0.5 : 1.0;
  if (w <= 0.0) {
    // (|sigma y + w|^p - |sigma x|^p) on x - y <= w / sigma.
    auto g = [=](double x, double y) {
      const double v = abs_pow(sigma * y + w, p) - abs_pow(sigma * x, p);
      if constexpr (Squared) {
        return v * v;
      } else {
        return v;
      }
    };
    total = add(total, integrate_wedge(g, c, Side::below, -c, q, abs_tol * share, rel_tol));
  }
  if (w >= 0.0) {
    // (|sigma x - w|^p - |sigma y|^p) on x - y >= w / sigma.
    auto g = [=](double x, double y) {
      const double v = abs_pow(sigma * x - w, p) - abs_pow(sigma * y, p);
      if constexpr (Squared) {
        return v * v;
      } else {
        return v;
      }
    };
    total = add(total, integrate_wedge(g, c, Side::above, c, q, abs_tol * share, rel_tol));
  }
  return total;
}

Estimate kernel_dispatch(KernelKind which, int p, double sigma, double w, const QuadratureConfig& q,
                         double abs_tol, double rel_tol) {
  return which == KernelKind::phi ? kernel_impl<false>(p, sigma, w, q, abs_tol, rel_tol)
                                  : kernel_impl<true>(p, sigma, w, q, abs_tol, rel_tol);
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("QuadratureConfig: abs_tol and rel_tol must be positive");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("QuadratureConfig: max_subdivisions must be positive");
  }
  if (!(tail_cutoff >= 6.0)) {
    throw std::invalid_argument("QuadratureConfig: tail_cutoff must be at least 6");
  }
}

double abs_moment(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw std::domain_error("abs_moment: p must be finite and >= 1");
  }
  return std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0))) /
         std::sqrt(std::numbers::pi);
}

double psi(int p, double x, double y, double w) {
  double r = 0.0;
  if (x - y <= w && w <= 0.0) {
    r += abs_pow(y + w, p) - abs_pow(x, p);
  }
  if (0.0 <= w && w <= x - y) {
    r += abs_pow(x - w, p) - abs_pow(y, p);
  }
  return r;
}

double psi_sigma(int p, double sigma, double x, double y, double w) {
  require_positive_sigma(sigma, "psi_sigma");
  return psi(p, sigma * x, sigma * y, w);
}

Estimate phi_kernel(int p, double sigma, double w, const QuadratureConfig& q) {
  require_positive_p(p, "phi_kernel");
  require_positive_sigma(sigma, "phi_kernel");
  q.validate();
  return kernel_impl<false>(p, sigma, w, q, q.abs_tol, q.rel_tol);
}

Estimate phi2_kernel(int p, double sigma, double w, const QuadratureConfig& q) {
  require_positive_p(p, "phi2_kernel");
  require_positive_sigma(sigma, "phi2_kernel");
  q.validate();
  Estimate e = kernel_impl<true>(p, sigma, w, q, q.abs_tol, q.rel_tol);
  e.value = std::max(e.value, 0.0);
  return e;
}

Estimate phi_kernel_swapped(int p, double sigma, double w, const QuadratureConfig& q) {
  require_positive_p(p, "phi_kernel_swapped");
  require_positive_sigma(sigma, "phi_kernel_swapped");
  q.validate();
  // Psi(sigma y, sigma x, -w) is supported on x - y <= w/sigma for w <= 0 and
  // on x - y >= w/sigma for w >= 0.
  auto g = [=](double x, double y) { return psi_sigma(p, sigma, y, x, -w); };
  const double c = w / sigma;
  const double share = (w == 0.0) ? 0.5 : 1.0;
  Estimate total;
  if (w <= 0.0) {
    total = add(total, integrate_wedge(g, c, Side::below, -c, q, q.abs_tol * share, q.rel_tol));
  }
  if (w >= 0.0) {
    total = add(total, integrate_wedge(g, c, Side::above, c, q, q.abs_tol * share, q.rel_tol));
  }
  return total;
}

double kernel_support_halfwidth(int p, double sigma, const QuadratureConfig& q) {
  require_positive_p(p, "kernel_support_halfwidth");
  require_positive_sigma(sigma, "kernel_support_halfwidth");
  // Cauchy-Schwarz on E[(|sigma Y + w|^p + |sigma X|^p)^r 1{X - Y <= -|w|/sigma}]
  // with r = 2 covers both phi and phi2:
  //   |phi2(w)| <= (||a||_4 + ||b||_4)^2 sqrt(P), |phi(w)| <= that^(1/2) sqrt(P)...
  // we use the phi2 form, which dominates for the tolerances of interest.
  const double m4p = abs_moment(4.0 * p);
  const double norm_y = sigma * std::pow(m4p, 1.0 / (4.0 * p));
  const double norm_x = std::pow(sigma, p) * std::pow(m4p, 0.25);
  auto bound = [&](double w) {
    const double a = std::pow(norm_y + w, p) + norm_x;
    const double tail = normal_sf(w / (sigma * std::numbers::sqrt2));
    return std::max(a, std::sqrt(a)) * a * std::sqrt(tail);
  };
  const double domain_end = 2.0 * q.tail_cutoff * sigma;
  const double step = 0.25 * sigma;
  for (double w = step; w < domain_end; w += step) {
    // The bound is decreasing once the Gaussian factor dominates; require a
    // further decade of margin so the tail integral stays below abs_tol too.
    if (bound(w) * (4.0 * sigma) < 1e-2 * q.abs_tol) {
      return w;
    }
  }
  return domain_end;
}

Estimate lambda_integral(int p, double sigma, KernelKind which, const QuadratureConfig& q) {
  require_positive_p(p, "lambda_integral");
  require_positive_sigma(sigma, "lambda_integral");
  q.validate();
  const double half = kernel_support_halfwidth(p, sigma, q);
  const double inner_abs = q.abs_tol / (4.0 * half);
  const double inner_rel = q.rel_tol / 4.0;
  auto f = [&](double w) { return kernel_dispatch(which, p, sigma, w, q, inner_abs, inner_rel); };
  const std::array<double, 3> breaks{-half, 0.0, half};
  Estimate e = integrate_adaptive(f, std::span<const double>(breaks), q.tolerance());
  if (which == KernelKind::phi2) {
    e.value = std::max(e.value, 0.0);
  }
  return e;
}

double bias_bracket(double u) {
  // u Phibar(u) Phi(u) / phi(u) = u * Mills(u) * Phi(u).
  return 0.5 - normal_sf(u) - u * mills_ratio(u) * normal_cdf(u);
}

double bias_integrand(int p, double u) {
  return 2.0 * p * ipow(u, p - 1) * normal_pdf(u) * bias_bracket(u);
}

Estimate bias_integral(int p, const QuadratureConfig& q) {
  require_positive_p(p, "bias_integral");
  q.validate();
  // |bracket| <= 1 on [0, inf); for u^2 > 2(p - 1) the tail
  // int_U^inf 2p u^{p-1} phi(u) du <= 2p U^{p-1} phi(U) / (U - (p - 1)/U).
  double upper = std::max(2.0, std::sqrt(2.0 * p));
  for (;; upper += 0.25) {
    const double tail =
        2.0 * p * ipow(upper, p - 1) * normal_pdf(upper) / (upper - (p - 1) / upper);
    if (tail < 1e-3 * q.abs_tol) {
      break;
    }
  }
  return integrate_adaptive([p](double u) { return bias_integrand(p, u); }, 0.0, upper,
                            q.tolerance());
}

KernelTable KernelTable::build(int p, double sigma, int points, const QuadratureConfig& q) {
  if (points < 2) {
    throw std::invalid_argument("KernelTable: need at least two grid points");
  }
  const double half = kernel_support_halfwidth(p, sigma, q);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = -half + 2.0 * half * i / (points - 1);
  }
  return build(p, sigma, std::move(grid), q);
}

KernelTable KernelTable::build(int p, double sigma, std::vector<double> w_grid,
                               const QuadratureConfig& q) {
  require_positive_p(p, "KernelTable");
  require_positive_sigma(sigma, "KernelTable");
  q.validate();
  for (std::size_t i = 1; i < w_grid.size(); ++i) {
    if (!(w_grid[i - 1] < w_grid[i])) {
      throw std::invalid_argument("KernelTable: w grid must be strictly increasing");
    }
  }
  KernelTable t;
  t.p_ = p;
  t.sigma_ = sigma;
  t.q_ = q;
  t.w_ = std::move(w_grid);
  t.phi_.reserve(t.w_.size());
  t.phi2_.reserve(t.w_.size());
  for (double w : t.w_) {
    const Estimate a = phi_kernel(p, sigma, w, q);
    t.phi_.push_back(a.value);
    t.phi_err_.push_back(a.error);
    t.phi2_.push_back(phi2_kernel(p, sigma, w, q).value);
  }
  t.lambda_phi_ = lambda_integral(p, sigma, KernelKind::phi, q);
  t.lambda_phi2_ = lambda_integral(p, sigma, KernelKind::phi2, q);
  return t;
}

void KernelTable::write_csv(std::ostream& os) const {
  os << "# p=" << p_ << " sigma=" << csv::format_double(sigma_)
     << " lambda_phi=" << csv::format_double(lambda_phi_.value)
     << " lambda_phi_err=" << csv::format_double(lambda_phi_.error)
     << " lambda_phi2=" << csv::format_double(lambda_phi2_.value)
     << " lambda_phi2_err=" << csv::format_double(lambda_phi2_.error)
     << " abs_tol=" << csv::format_double(q_.abs_tol) << " rel_tol=" << csv::format_double(q_.rel_tol)
     << " max_subdivisions=" << q_.max_subdivisions
     << " tail_cutoff=" << csv::format_double(q_.tail_cutoff) << '\n';
  os << "w,phi,phi2\n";
  for (std::size_t i = 0; i < w_.size(); ++i) {
    os << csv::format_double(w_[i]) << ',' << csv::format_double(phi_[i]) << ','
       << csv::format_double(phi2_[i]) << '\n';
  }
}

}  // namespace brpv::kernels
