#include "vfeller/model.hpp"

#include <cmath>

#include "vfeller/errors.hpp"

namespace vfeller {

namespace {

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(key, std::string(key) + " must be positive and finite");
  }
}

void require_finite(double v, const char* key) {
  if (!std::isfinite(v)) throw ValidationError(key, std::string(key) + " must be finite");
}

}  // namespace

ModelSpec::ModelSpec(Family f, double l, double r, double x0)
    : family_(std::move(f)), l_(l), r_(r), x0_(x0) {
  require_finite(x0, "x0");
  if (!(x0 > l && x0 < r)) throw ValidationError("x0", "x0 must lie strictly inside the interval");
}

ModelSpec ModelSpec::cir(double kappa, double theta, double sigma, double x0) {
  require_positive(kappa, "kappa");
  require_positive(theta, "theta");
  require_positive(sigma, "sigma");
  return ModelSpec(CIRParams{kappa, theta, sigma}, 0.0, std::numeric_limits<double>::infinity(),
                   x0);
}

ModelSpec ModelSpec::jacobi(double a, double b, double kappa, double theta, double sigma,
                            double x0) {
  require_finite(a, "a");
  require_finite(b, "b");
  if (!(a < b)) throw ValidationError("b", "Jacobi interval needs a < b");
  require_positive(kappa, "kappa");
  require_positive(sigma, "sigma");
  if (!(theta > a && theta < b)) throw ValidationError("theta", "theta must lie in (a, b)");
  return ModelSpec(JacobiParams{a, b, kappa, theta, sigma}, a, b, x0);
}

ModelSpec ModelSpec::power(double alpha, double delta, double sigma, double x0) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw ValidationError("alpha", "alpha must exceed 1");
  if (!(delta >= 0.0 && delta < 1.0)) throw ValidationError("delta", "delta must lie in [0, 1)");
  require_positive(sigma, "sigma");
  const double inf = std::numeric_limits<double>::infinity();
  return ModelSpec(PowerParams{alpha, delta, sigma}, -inf, inf, x0);
}

ModelSpec ModelSpec::custom(std::function<double(double)> drift,
                            std::function<double(double)> diffusion, double l, double r,
                            double x0) {
  if (!drift) throw ValidationError("drift", "custom model needs a drift callable");
  if (!diffusion) throw ValidationError("diffusion", "custom model needs a diffusion callable");
  if (std::isnan(l) || std::isnan(r) || !(l < r)) throw ValidationError("r", "interval needs l < r");
  CustomCoefficients c{std::move(drift), std::move(diffusion), l, r};
  return ModelSpec(std::move(c), l, r, x0);
}

bool ModelSpec::bounded() const noexcept { return std::isfinite(l_) && std::isfinite(r_); }

ModelSpec ModelSpec::with_x0(double x0) const {
  ModelSpec copy = *this;
  require_finite(x0, "x0");
  if (!(x0 > l_ && x0 < r_)) throw ValidationError("x0", "x0 must lie strictly inside the interval");
  copy.x0_ = x0;
  return copy;
}

std::string ModelSpec::family_name() const {
  switch (family_.index()) {
    case 0: return "cir";
    case 1: return "jacobi";
    case 2: return "power";
    default: return "custom";
  }
}

double ModelSpec::drift(double x) const {
  if (auto* p = std::get_if<CIRParams>(&family_)) return p->kappa * (p->theta - x);
  if (auto* p = std::get_if<JacobiParams>(&family_)) return p->kappa * (p->theta - x);
  if (auto* p = std::get_if<PowerParams>(&family_)) return std::pow(std::abs(x), p->alpha);
  return std::get<CustomCoefficients>(family_).drift(x);
}

double ModelSpec::diffusion(double x) const {
  if (auto* p = std::get_if<CIRParams>(&family_)) return p->sigma * std::sqrt(x);
  if (auto* p = std::get_if<JacobiParams>(&family_)) {
    return p->sigma * std::sqrt((x - p->a) * (p->b - x));
  }
  if (auto* p = std::get_if<PowerParams>(&family_)) {
    return p->delta == 0.0 ? p->sigma : p->sigma * std::pow(std::abs(x), 0.5 * p->delta);
  }
  return std::get<CustomCoefficients>(family_).diffusion(x);
}

bool ModelSpec::same_as(const ModelSpec& o) const {
  if (family_.index() != o.family_.index() || x0_ != o.x0_ || l_ != o.l_ || r_ != o.r_) {
    return false;
  }
  if (auto* p = std::get_if<CIRParams>(&family_)) {
    auto& q = std::get<CIRParams>(o.family_);
    return p->kappa == q.kappa && p->theta == q.theta && p->sigma == q.sigma;
  }
  if (auto* p = std::get_if<JacobiParams>(&family_)) {
    auto& q = std::get<JacobiParams>(o.family_);
    return p->a == q.a && p->b == q.b && p->kappa == q.kappa && p->theta == q.theta &&
           p->sigma == q.sigma;
  }
  if (auto* p = std::get_if<PowerParams>(&family_)) {
    auto& q = std::get<PowerParams>(o.family_);
    return p->alpha == q.alpha && p->delta == q.delta && p->sigma == q.sigma;
  }
  return true;
}

}  // namespace vfeller
