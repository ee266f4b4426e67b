#pragma once

// Independent reference computations for the unit tests. Nothing here calls the library.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// K(0), K'(0) of the truncated fractional kernel via std::tgamma.
inline double frac_k0(double a, double T) { return std::pow(T, 1 - a) / (std::tgamma(a) * std::tgamma(2 - a)); }
inline double frac_kp0(double a, double T) {
  return -std::pow(T, 2 - a) / ((2 - a) * std::tgamma(a) * std::tgamma(1 - a));
}

// Moment int_lo^hi x^k x^{-a} dx / (Gamma(a) Gamma(1 - a)).
inline double frac_moment(double a, double lo, double hi, int k) {
  const double e = k + 1 - a;
  return (std::pow(hi, e) - std::pow(lo, e)) / (e * std::tgamma(a) * std::tgamma(1 - a));
}

inline bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace oracle
