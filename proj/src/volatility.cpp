#include "brpv/volatility.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>

#include "brpv/csv.hpp"

namespace brpv {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) {
    r *= x;
  }
  return r;
}

double binomial(int k, int j) {
  double r = 1.0;
  for (int i = 1; i <= j; ++i) {
    r = r * (k - j + i) / i;
  }
  return r;
}

}  // namespace

VolatilitySpec VolatilitySpec::constant(double sigma) {
  VolatilitySpec v;
  v.form_ = Form::constant;
  v.a_ = sigma;
  v.finish();
  return v;
}

VolatilitySpec VolatilitySpec::power_law(double a, double b, double gamma) {
  VolatilitySpec v;
  v.form_ = Form::power_law;
  v.a_ = a;
  v.b_ = b;
  v.gamma_ = gamma;
  v.finish();
  return v;
}

VolatilitySpec VolatilitySpec::table(std::vector<double> s, std::vector<double> h) {
  VolatilitySpec v;
  v.form_ = Form::table;
  v.s_ = std::move(s);
  v.h_ = std::move(h);
  v.finish();
  return v;
}

VolatilitySpec VolatilitySpec::read_table_csv(std::istream& in) {
  std::vector<double> s;
  std::vector<double> h;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto fields = csv::split(line);
    if (fields.size() != 2) {
      throw std::invalid_argument("H table: expected two columns per row");
    }
    try {
      const double sv = csv::parse_double(fields[0]);
      const double hv = csv::parse_double(fields[1]);
      s.push_back(sv);
      h.push_back(hv);
    } catch (const std::invalid_argument&) {
      if (!first) {
        throw;
      }
    }
    first = false;
  }
  return table(std::move(s), std::move(h));
}

void VolatilitySpec::finish() {
  switch (form_) {
    case Form::constant:
      if (!(a_ > 0.0) || !std::isfinite(a_)) {
        throw std::invalid_argument("VolatilitySpec: constant sigma must be positive");
      }
      inf_ = sup_ = a_;
      holder_ = 1.0;
      break;
    case Form::power_law:
      if (!std::isfinite(a_) || !std::isfinite(b_) || !std::isfinite(gamma_)) {
        throw std::invalid_argument("VolatilitySpec: non-finite power-law parameter");
      }
      if (b_ != 0.0 && !(gamma_ > 0.5)) {
        throw std::invalid_argument("VolatilitySpec: power-law exponent must exceed 1/2");
      }
      inf_ = std::min(a_, a_ + b_);
      sup_ = std::max(a_, a_ + b_);
      holder_ = b_ == 0.0 ? 1.0 : std::min(gamma_, 1.0);
      break;
    case Form::table:
      if (s_.size() < 2 || s_.size() != h_.size()) {
        throw std::invalid_argument("VolatilitySpec: table needs at least two (s, H) rows");
      }
      if (s_.front() != 0.0 || s_.back() != 1.0) {
        throw std::invalid_argument("VolatilitySpec: table must start at s=0 and end at s=1");
      }
      for (std::size_t i = 1; i < s_.size(); ++i) {
        if (!(s_[i - 1] < s_[i])) {
          throw std::invalid_argument("VolatilitySpec: table s must be strictly increasing");
        }
      }
      inf_ = *std::min_element(h_.begin(), h_.end());
      sup_ = *std::max_element(h_.begin(), h_.end());
      holder_ = 1.0;
      break;
  }
  if (!(inf_ > 0.0) || !std::isfinite(sup_)) {
    throw std::invalid_argument("VolatilitySpec: H must be bounded away from zero and finite");
  }
}

double VolatilitySpec::operator()(double s) const {
  switch (form_) {
    case Form::constant:
      return a_;
    case Form::power_law:
      return a_ + b_ * std::pow(s, gamma_);
    case Form::table: {
      if (s <= 0.0) {
        return h_.front();
      }
      if (s >= 1.0) {
        return h_.back();
      }
      const auto it = std::upper_bound(s_.begin(), s_.end(), s);
      const std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
      const double frac = (s - s_[k]) / (s_[k + 1] - s_[k]);
      return h_[k] + frac * (h_[k + 1] - h_[k]);
    }
  }
  return a_;
}

double VolatilitySpec::integrated_power(double a, double b, int k) const {
  if (!(a >= 0.0 && b <= 1.0)) {
    throw std::domain_error("integrated_power: interval must lie in [0, 1]");
  }
  if (a > b) {
    throw std::domain_error("integrated_power: a > b");
  }
  if (k < 0) {
    throw std::domain_error("integrated_power: k must be nonnegative");
  }
  switch (form_) {
    case Form::constant:
      return ipow(a_, k) * (b - a);
    case Form::power_law: {
      // sum_j C(k,j) a^{k-j} b^j (s^{j gamma + 1} / (j gamma + 1)) evaluated on [a, b].
      double total = 0.0;
      for (int j = 0; j <= k; ++j) {
        const double e = j * gamma_ + 1.0;
        total += binomial(k, j) * ipow(a_, k - j) * ipow(b_, j) * (std::pow(b, e) - std::pow(a, e)) / e;
      }
      return total;
    }
    case Form::table: {
      // On a linear piece from h0 to h1 over length L:
      // int h^k = L (h1^{k+1} - h0^{k+1}) / ((k+1)(h1 - h0)) = L/(k+1) sum_j h0^j h1^{k-j}.
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
        const double lo = std::max(a, s_[i]);
        const double hi = std::min(b, s_[i + 1]);
        if (!(lo < hi)) {
          continue;
        }
        const double h0 = (*this)(lo);
        const double h1 = hi >= s_[i + 1] ? h_[i + 1] : (*this)(hi);
        double sum = 0.0;
        for (int j = 0; j <= k; ++j) {
          sum += ipow(h0, j) * ipow(h1, k - j);
        }
        total += (hi - lo) * sum / (k + 1);
      }
      return total;
    }
  }
  return 0.0;
}

double integrated_variance(const VolatilitySpec& h, double a, double b) {
  return h.integrated_power(a, b, 2);
}

}  // namespace brpv
