#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) integration over a list of
// breakpoints. The integrand may return a plain double or an Estimate; in the
// latter case the inner error is integrated alongside the value so nested
// (iterated) integrals report an honest combined error.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace brpv {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Thrown when the requested tolerance is not reached within the subdivision
/// budget. Carries the best estimate found.
class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& what, Estimate best)
      : std::runtime_error(what), best_(best) {}
  const Estimate& best() const noexcept { return best_; }

 private:
  Estimate best_;
};

struct AdaptiveTolerance {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;

  double target(double value) const { return std::max(abs_tol, rel_tol * std::abs(value)); }
};

namespace detail {

// Abscissae and weights of the 15-point Kronrod rule with its embedded
// 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class R>
Estimate as_estimate(const R& r) {
  if constexpr (std::is_same_v<R, Estimate>) {
    return r;
  } else {
    return Estimate{static_cast<double>(r), 0.0};
  }
}

struct Segment {
  double a = 0.0;
  double b = 0.0;
  Estimate est;
  bool operator<(const Segment& other) const { return est.error < other.est.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  const Estimate fc = as_estimate(f(centre));
  double result_k = fc.value * kWgk[7];
  double result_g = fc.value * kWg[3];
  double result_abs = std::abs(result_k);
  double inner_err = fc.error * kWgk[7];

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Estimate lo = as_estimate(f(centre - dx));
    const Estimate hi = as_estimate(f(centre + dx));
    f1[j] = lo.value;
    f2[j] = hi.value;
    const double sum = lo.value + hi.value;
    result_k += kWgk[j] * sum;
    result_abs += kWgk[j] * (std::abs(lo.value) + std::abs(hi.value));
    inner_err += kWgk[j] * (lo.error + hi.error);
    if (j % 2 == 1) {
      result_g += kWg[j / 2] * sum;
    }
  }

  const double mean = result_k * 0.5;
  double result_asc = kWgk[7] * std::abs(fc.value - mean);
  for (int j = 0; j < 7; ++j) {
    result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  result_k *= half;
  result_abs *= abs_half;
  result_asc *= abs_half;
  double err = std::abs((result_k - result_g * half));
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  if (result_abs > uflow / (50.0 * eps)) {
    err = std::max(50.0 * eps * result_abs, err);
  }
  return Segment{a, b, Estimate{result_k, err + abs_half * inner_err}};
}

}  // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], treating every interior
/// breakpoint as a segment boundary. Subdivides the worst segment until the
/// summed error estimate meets tol.target(value).
template <class F>
Estimate integrate_adaptive(F&& f, std::span<const double> breaks, const AdaptiveTolerance& tol) {
  if (breaks.size() < 2) {
    throw std::invalid_argument("integrate_adaptive: need at least two breakpoints");
  }
  std::priority_queue<detail::Segment> heap;
  Estimate total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) {
      if (breaks[i] == breaks[i + 1]) {
        continue;
      }
      throw std::invalid_argument("integrate_adaptive: breakpoints must be sorted");
    }
    detail::Segment s = detail::gk15(f, breaks[i], breaks[i + 1]);
    total.value += s.est.value;
    total.error += s.est.error;
    heap.push(s);
  }
  int segments = static_cast<int>(heap.size());
  while (!heap.empty() && total.error > tol.target(total.value)) {
    if (segments >= tol.max_subdivisions) {
      throw QuadratureFailure("adaptive quadrature: tolerance not reached within subdivision budget",
                              total);
    }
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw QuadratureFailure("adaptive quadrature: segment too small to subdivide", total);
    }
    const detail::Segment left = detail::gk15(f, worst.a, mid);
    const detail::Segment right = detail::gk15(f, mid, worst.b);
    total.value += left.est.value + right.est.value - worst.est.value;
    total.error += left.est.error + right.est.error - worst.est.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  // Re-sum to shed the drift of the incremental updates.
  Estimate resum;
  while (!heap.empty()) {
    resum.value += heap.top().est.value;
    resum.error += heap.top().est.error;
    heap.pop();
  }
  return resum;
}

template <class F>
Estimate integrate_adaptive(F&& f, double a, double b, const AdaptiveTolerance& tol) {
  const std::array<double, 2> breaks{a, b};
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(breaks), tol);
}

}  // namespace brpv
