#pragma once

#include <functional>
#include <limits>
#include <string>
#include <variant>

namespace vfeller {

struct CIRParams {
  double kappa = 1.0;
  double theta = 1.0;
  double sigma = 1.0;
};

struct JacobiParams {
  double a = 0.0;
  double b = 1.0;
  double kappa = 1.0;
  double theta = 0.5;
  double sigma = 1.0;
};

/// b(x) = |x|^alpha, sigma(x) = sigma |x|^{delta/2}.
struct PowerParams {
  double alpha = 2.0;
  double delta = 0.0;
  double sigma = 1.0;
};

/// User-supplied coefficients. Nondegeneracy and local integrability of
/// sigma^{-2} and |b| sigma^{-2} are the caller's responsibility.
struct CustomCoefficients {
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
  double l = -std::numeric_limits<double>::infinity();
  double r = std::numeric_limits<double>::infinity();
};

class ModelSpec {
 public:
  using Family = std::variant<CIRParams, JacobiParams, PowerParams, CustomCoefficients>;

  static ModelSpec cir(double kappa, double theta, double sigma, double x0);
  static ModelSpec jacobi(double a, double b, double kappa, double theta, double sigma, double x0);
  static ModelSpec power(double alpha, double delta, double sigma, double x0);
  static ModelSpec custom(std::function<double(double)> drift,
                          std::function<double(double)> diffusion, double l, double r, double x0);

  const Family& family() const noexcept { return family_; }
  std::string family_name() const;
  bool is_custom() const noexcept { return std::holds_alternative<CustomCoefficients>(family_); }

  double l() const noexcept { return l_; }
  double r() const noexcept { return r_; }
  double x0() const noexcept { return x0_; }
  bool contains(double x) const noexcept { return x > l_ && x < r_; }
  bool bounded() const noexcept;

  /// Copy with a different starting point (validated).
  ModelSpec with_x0(double x0) const;

  double drift(double x) const;
  double diffusion(double x) const;

  /// Same family and parameters. Custom models compare equal only to themselves
  /// by interval and x0, callables cannot be compared.
  bool same_as(const ModelSpec& other) const;

 private:
  ModelSpec(Family f, double l, double r, double x0);
  Family family_;
  double l_;
  double r_;
  double x0_;
};

}  // namespace vfeller
