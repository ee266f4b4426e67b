#pragma once

#include <string>
#include <variant>
#include <vector>

namespace vfeller {

/// K(t) = level.
struct ConstantKernel {
  double level = 1.0;
};

/// K(t) = sum_n weights[n] * exp(-rates[n] * t).
struct SumOfExponentials {
  std::vector<double> weights;
  std::vector<double> rates;
};

/// Fractional kernel with its Bernstein-Widder mixing measure truncated at rate T:
/// K(t) = int_0^T exp(-x t) x^{-alpha} / (Gamma(alpha) Gamma(1 - alpha)) dx.
struct TruncatedFractional {
  double alpha = 0.5;
  double T = 1.0;
};

/// A nonsingular, completely monotone convolution kernel. Immutable once built;
/// construct through the factories so the invariants are checked.
class KernelSpec {
 public:
  using Variant = std::variant<ConstantKernel, SumOfExponentials, TruncatedFractional>;

  static KernelSpec constant(double level);
  static KernelSpec sum_of_exponentials(std::vector<double> weights, std::vector<double> rates);
  static KernelSpec truncated_fractional(double alpha, double T);

  const Variant& variant() const noexcept { return kind_; }
  std::string kind_name() const;
  bool is_constant() const noexcept { return std::holds_alternative<ConstantKernel>(kind_); }

  friend bool operator==(const KernelSpec& a, const KernelSpec& b);

 private:
  explicit KernelSpec(Variant v) : kind_(std::move(v)) {}
  Variant kind_;
};

/// K(0) and K'(0), the only kernel data the boundary tests consume.
struct KernelScalars {
  double k0 = 1.0;
  double kp0 = 0.0;
  /// Set when the kernel is known to satisfy the resolvent hypotheses
  /// (completely monotone, or a resolvent check passed).
  bool hypotheses_hold = true;

  /// Kp0 / K0, the coefficient of the path-dependent drift correction.
  double ratio() const noexcept { return kp0 / k0; }

  /// Scalars for a user kernel that is not a KernelSpec. The hypotheses are
  /// taken on trust when `asserted` is true.
  static KernelScalars user_asserted(double k0, double kp0, bool asserted);
};

/// Pointwise evaluation of K(t), t >= 0.
double eval(const KernelSpec& kernel, double t);

/// Pointwise evaluation of K'(t), t >= 0.
double eval_derivative(const KernelSpec& kernel, double t);

/// Exact K(0) and K'(0).
KernelScalars k0_kprime0(const KernelSpec& kernel);

/// Antiderivative int_0^t K(s) ds.
double eval_integral(const KernelSpec& kernel, double t);

}  // namespace vfeller
