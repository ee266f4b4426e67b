#pragma once

#include <variant>
#include <vector>

#include "vfeller/kernels.hpp"

namespace vfeller {

struct TruncationScheme {
  double T = 1.0;
};

enum class QuadratureWeight {
  FractionalWeight,  // x^{-alpha} / (Gamma(alpha) Gamma(1 - alpha)) on every interval
  GeometricBB2       // fractional weight on [0, xi_1], unit weight beyond
};

struct QuadratureScheme {
  std::vector<double> nodes;  // xi_0 < xi_1 < ... < xi_N
  int q = 1;
  QuadratureWeight weight = QuadratureWeight::FractionalWeight;
};

/// A nonsingular approximation of the fractional kernel t^{alpha-1} / Gamma(alpha).
class ApproxScheme {
 public:
  using Kind = std::variant<TruncationScheme, QuadratureScheme>;

  static ApproxScheme truncation(double alpha, double T);
  static ApproxScheme quadrature(double alpha, std::vector<double> nodes, int q,
                                 QuadratureWeight weight);
  /// xi_0 = 0, xi_n = xi_1 * ratio^{n-1} for n = 1..N.
  static ApproxScheme geometric(double alpha, double xi1, double ratio, int N, int q,
                                QuadratureWeight weight);

  double alpha() const noexcept { return alpha_; }
  const Kind& kind() const noexcept { return kind_; }

 private:
  ApproxScheme(double alpha, Kind k) : alpha_(alpha), kind_(std::move(k)) {}
  double alpha_;
  Kind kind_;
};

std::vector<double> geometric_nodes(double xi1, double ratio, int N);

/// Gauss rule of order q for the weight restricted to [lo, hi].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule fractional_gauss_rule(double alpha, double lo, double hi, int q);
GaussRule unit_gauss_rule(double lo, double hi, int q);

KernelSpec truncation_kernel(double alpha, double T);
KernelSpec gaussian_quadrature_kernel(const ApproxScheme& scheme);
/// Truncation or quadrature kernel, whichever the scheme describes.
KernelSpec build_kernel(const ApproxScheme& scheme);

/// K(0), K'(0) from the analytic moment formulas of the scheme.
KernelScalars analytic_scalars(const ApproxScheme& scheme);

/// Gamma(alpha)^{-1} t^{alpha - 1}.
double fractional_kernel(double alpha, double t);

struct ApproxErrorRow {
  double t = 0.0;
  double approx = 0.0;
  double exact = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

std::vector<ApproxErrorRow> approximation_error(const ApproxScheme& scheme,
                                                const std::vector<double>& t_grid);

}  // namespace vfeller
