#include "vfeller/kernels.hpp"

#include <cmath>
#include <sstream>

#include "vfeller/errors.hpp"
#include "vfeller/quadrature.hpp"
#include "vfeller/special.hpp"

namespace vfeller {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_time(double t) {
  if (!(t >= 0.0)) throw DomainError("kernel evaluated at negative or NaN time");
}

// Normalisation 1 / (Gamma(alpha) Gamma(1 - alpha)) of the fractional mixing density.
double mixing_norm(double alpha) {
  return 1.0 / (special::gamma(alpha) * special::gamma(1.0 - alpha));
}

// Integrals against the fractional mixing density on [0, T] after the substitution
// u = x^{1-alpha}, which turns x^{-alpha} dx into du / (1 - alpha) and removes the
// singularity at x = 0. `g` receives x = u^{1/(1-alpha)}.
template <class G>
double fractional_integral(const TruncatedFractional& k, G&& g, const char* what) {
  const double p = 1.0 / (1.0 - k.alpha);
  const double upper = std::pow(k.T, 1.0 - k.alpha);
  quad::Options opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = 1e-13;
  opt.max_subdivisions = 4000;
  auto integrand = [&](double u) { return g(std::pow(u, p)); };
  quad::Result r = quad::integrate(integrand, 0.0, upper, opt);
  if (!r.finite || (!r.converged && r.abs_error > 1e-10 * std::abs(r.value))) {
    std::ostringstream msg;
    msg << "truncated fractional kernel: " << what << " quadrature did not converge (achieved "
        << r.abs_error << ")";
    throw NumericError(msg.str(), r.abs_error);
  }
  return mixing_norm(k.alpha) * r.value / (1.0 - k.alpha);
}

}  // namespace

KernelSpec KernelSpec::constant(double level) {
  if (!(level > 0.0) || !std::isfinite(level)) {
    throw ValidationError("level", "constant kernel level must be positive and finite");
  }
  return KernelSpec(ConstantKernel{level});
}

KernelSpec KernelSpec::sum_of_exponentials(std::vector<double> weights, std::vector<double> rates) {
  if (weights.empty()) throw ValidationError("m", "sum of exponentials needs at least one term");
  if (weights.size() != rates.size()) {
    throw ValidationError("x", "weights and rates must have the same length");
  }
  for (double m : weights) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("m", "weights must be positive");
  }
  for (double x : rates) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("x", "rates must be nonnegative");
  }
  return KernelSpec(SumOfExponentials{std::move(weights), std::move(rates)});
}

KernelSpec KernelSpec::truncated_fractional(double alpha, double T) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha", "alpha must lie in (0, 1)");
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "T must be positive");
  return KernelSpec(TruncatedFractional{alpha, T});
}

std::string KernelSpec::kind_name() const {
  return std::visit(overloaded{[](const ConstantKernel&) { return std::string("constant"); },
                               [](const SumOfExponentials&) { return std::string("sumexp"); },
                               [](const TruncatedFractional&) { return std::string("fractional"); }},
                    kind_);
}

bool operator==(const KernelSpec& a, const KernelSpec& b) {
  return std::visit(
      overloaded{[](const ConstantKernel& x, const ConstantKernel& y) { return x.level == y.level; },
                 [](const SumOfExponentials& x, const SumOfExponentials& y) {
                   return x.weights == y.weights && x.rates == y.rates;
                 },
                 [](const TruncatedFractional& x, const TruncatedFractional& y) {
                   return x.alpha == y.alpha && x.T == y.T;
                 },
                 [](const auto&, const auto&) { return false; }},
      a.kind_, b.kind_);
}

KernelScalars KernelScalars::user_asserted(double k0, double kp0, bool asserted) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw ValidationError("K0", "K(0) must be positive");
  if (!(kp0 <= 0.0) || !std::isfinite(kp0)) throw ValidationError("Kp0", "K'(0) must be nonpositive");
  return KernelScalars{k0, kp0, asserted};
}

double eval(const KernelSpec& kernel, double t) {
  require_time(t);
  return std::visit(
      overloaded{[](const ConstantKernel& k) { return k.level; },
                 [t](const SumOfExponentials& k) {
                   double s = 0.0;
                   for (std::size_t i = 0; i < k.weights.size(); ++i) {
                     s += k.weights[i] * std::exp(-k.rates[i] * t);
                   }
                   return s;
                 },
                 [t](const TruncatedFractional& k) {
                   if (t == 0.0) return k0_kprime0(KernelSpec::truncated_fractional(k.alpha, k.T)).k0;
                   return fractional_integral(k, [t](double x) { return std::exp(-x * t); }, "K(t)");
                 }},
      kernel.variant());
}

double eval_derivative(const KernelSpec& kernel, double t) {
  require_time(t);
  return std::visit(
      overloaded{[](const ConstantKernel&) { return 0.0; },
                 [t](const SumOfExponentials& k) {
                   double s = 0.0;
                   for (std::size_t i = 0; i < k.weights.size(); ++i) {
                     s -= k.weights[i] * k.rates[i] * std::exp(-k.rates[i] * t);
                   }
                   return s;
                 },
                 [t](const TruncatedFractional& k) {
                   if (t == 0.0) return k0_kprime0(KernelSpec::truncated_fractional(k.alpha, k.T)).kp0;
                   return -fractional_integral(k, [t](double x) { return x * std::exp(-x * t); },
                                               "K'(t)");
                 }},
      kernel.variant());
}

double eval_integral(const KernelSpec& kernel, double t) {
  require_time(t);
  if (t == 0.0) return 0.0;
  return std::visit(
      overloaded{[t](const ConstantKernel& k) { return k.level * t; },
                 [t](const SumOfExponentials& k) {
                   double s = 0.0;
                   for (std::size_t i = 0; i < k.weights.size(); ++i) {
                     const double x = k.rates[i];
                     s += x == 0.0 ? k.weights[i] * t : -k.weights[i] * std::expm1(-x * t) / x;
                   }
                   return s;
                 },
                 [t](const TruncatedFractional& k) {
                   return fractional_integral(
                       k,
                       [t](double x) { return x == 0.0 ? t : -std::expm1(-x * t) / x; },
                       "int K");
                 }},
      kernel.variant());
}

KernelScalars k0_kprime0(const KernelSpec& kernel) {
  return std::visit(
      overloaded{[](const ConstantKernel& k) { return KernelScalars{k.level, 0.0, true}; },
                 [](const SumOfExponentials& k) {
                   double k0 = 0.0;
                   double kp0 = 0.0;
                   for (std::size_t i = 0; i < k.weights.size(); ++i) {
                     k0 += k.weights[i];
                     kp0 -= k.weights[i] * k.rates[i];
                   }
                   return KernelScalars{k0, kp0, true};
                 },
                 [](const TruncatedFractional& k) {
                   const double a = k.alpha;
                   const double k0 =
                       std::pow(k.T, 1.0 - a) / (special::gamma(a) * special::gamma(2.0 - a));
                   const double kp0 = -std::pow(k.T, 2.0 - a) /
                                      ((2.0 - a) * special::gamma(a) * special::gamma(1.0 - a));
                   return KernelScalars{k0, kp0, true};
                 }},
      kernel.variant());
}

}  // namespace vfeller
