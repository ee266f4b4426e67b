#include "vfeller/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "vfeller/errors.hpp"

namespace vfeller::special {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Lanczos series for x >= 1/2, returned as log Gamma(x).
double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double sum = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
    sum += kLanczosCoef[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

}  // namespace

double gamma(double x) {
  if (std::isnan(x)) return x;
  if (x == std::floor(x) && x <= 0.0) {
    throw DomainError("gamma: pole at non-positive integer");
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
  }
  // Exact factorials for small integers keep Gamma(n) = (n-1)! bit-exact.
  if (x == std::floor(x) && x <= 21.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  return std::exp(lanczos_log_gamma(x));
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) return std::log(std::abs(gamma(x)));
  return lanczos_log_gamma(x);
}

}  // namespace vfeller::special
