#pragma once

// Deterministic volatility H on [0, 1]: constant, a + b s^gamma, or a
// piecewise-linear table.

#include <iosfwd>
#include <vector>

namespace brpv {

class VolatilitySpec {
 public:
  enum class Form { constant, power_law, table };

  static VolatilitySpec constant(double sigma);
  /// H(s) = a + b s^gamma. Requires gamma > 1/2 unless b == 0.
  static VolatilitySpec power_law(double a, double b, double gamma);
  /// Linear interpolation through (s_k, h_k); s strictly increasing from 0 to 1.
  static VolatilitySpec table(std::vector<double> s, std::vector<double> h);
  /// Reads "s,H_s" rows; a non-numeric first line is taken as a header.
  static VolatilitySpec read_table_csv(std::istream& in);

  Form form() const { return form_; }
  double operator()(double s) const;
  double holder_exponent() const { return holder_; }
  double inf_h() const { return inf_; }
  double sup_h() const { return sup_; }
  bool is_constant() const { return form_ == Form::constant; }

  /// Parameters of the active form: constant uses a(); power law a(), b(), gamma().
  double a() const { return a_; }
  double b() const { return b_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& table_s() const { return s_; }
  const std::vector<double>& table_h() const { return h_; }

  /// int_a^b H_s^k ds, exact for every form; 0 <= a <= b <= 1.
  double integrated_power(double a, double b, int k) const;

 private:
  VolatilitySpec() = default;
  void finish();

  Form form_ = Form::constant;
  double a_ = 1.0;
  double b_ = 0.0;
  double gamma_ = 1.0;
  std::vector<double> s_;
  std::vector<double> h_;
  double holder_ = 1.0;
  double inf_ = 1.0;
  double sup_ = 1.0;
};

/// int_a^b H_s^2 ds.
double integrated_variance(const VolatilitySpec& h, double a, double b);

}  // namespace brpv
