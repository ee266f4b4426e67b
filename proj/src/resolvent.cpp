#include "vfeller/resolvent.hpp"

#include <cmath>
#include <sstream>

#include "vfeller/errors.hpp"

namespace vfeller {

ResolventGrid solve_resolvent(const KernelSpec& kernel, double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw ValidationError("horizon", "horizon must be >= dt");
  const KernelScalars ks = k0_kprime0(kernel);
  const int n = static_cast<int>(std::floor(horizon / dt + 1e-9));
  // Toeplitz tables: K, K' and int_0 K on the grid multiples of dt.
  std::vector<double> K(n + 1), Kp(n + 1), IK(n + 1);
  for (int m = 0; m <= n; ++m) {
    K[m] = eval(kernel, m * dt);
    Kp[m] = eval_derivative(kernel, m * dt);
    IK[m] = eval_integral(kernel, m * dt);
  }
  const double pivot = K[1] * dt;
  if (!(ks.k0 > 1e-300) || !(std::abs(pivot) > 1e-300 * std::max(1.0, ks.k0))) {
    throw NumericError("resolvent triangular solve is ill-conditioned (K(dt) dt vanishes)", pivot);
  }
  ResolventGrid g;
  g.dt = dt;
  g.horizon = n * dt;
  g.atom = 1.0 / ks.k0;
  g.t.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.t[i] = i * dt;
  g.density.assign(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    double acc = 1.0 - K[i] * g.atom;
    for (int j = 0; j + 1 < i; ++j) acc -= K[i - j] * g.density[j] * dt;
    g.density[i - 1] = acc / pivot;
  }
  // Last cell has no equation; continue the density flat.
  if (n >= 1) g.density[n] = g.density[n - 1];

  g.kprime_conv_L.assign(n + 1, 0.0);
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    double conv = K[i] * g.atom;
    double dconv = Kp[i] * g.atom;
    for (int j = 0; j < i; ++j) {
      conv += g.density[j] * (IK[i - j] - IK[i - j - 1]);
      dconv += g.density[j] * (K[i - j] - K[i - j - 1]);
    }
    g.kprime_conv_L[i] = dconv;
    worst = std::max(worst, std::abs(conv - 1.0));
  }
  g.residual = worst;
  if (!std::isfinite(worst) || worst > 10.0 * dt) {
    std::ostringstream msg;
    msg << "resolvent residual " << worst << " exceeds 10 dt = " << 10.0 * dt;
    throw NumericError(msg.str(), worst);
  }
  return g;
}

HypothesisReport check_hypotheses(const ResolventGrid& g, double tol) {
  HypothesisReport r;
  r.tol = tol > 0.0 ? tol : 100.0 * g.dt;
  const int n = static_cast<int>(g.density.size());
  for (int i = 0; i < n; ++i) {
    if (r.worst_density_index < 0 || g.density[i] < r.worst_density) {
      r.worst_density = g.density[i];
      r.worst_density_index = i;
    }
    if (r.worst_positive_index < 0 || g.kprime_conv_L[i] > r.worst_positive) {
      r.worst_positive = g.kprime_conv_L[i];
      r.worst_positive_index = i;
    }
    if (i + 1 < n) {
      const double drop = g.kprime_conv_L[i + 1] - g.kprime_conv_L[i];
      if (r.worst_decrease_index < 0 || drop < r.worst_decrease) {
        r.worst_decrease = drop;
        r.worst_decrease_index = i;
      }
    }
  }
  r.density_nonnegative = r.worst_density >= -r.tol;
  r.kprime_nonpositive = r.worst_positive <= r.tol;
  r.kprime_nondecreasing = r.worst_decrease_index < 0 || r.worst_decrease >= -r.tol;
  return r;
}

KernelScalars verified_scalars(const KernelSpec& kernel, double dt, double horizon) {
  KernelScalars ks = k0_kprime0(kernel);
  try {
    ks.hypotheses_hold = check_hypotheses(solve_resolvent(kernel, dt, horizon)).all();
  } catch (const NumericError&) {
    ks.hypotheses_hold = false;
  }
  return ks;
}

}  // namespace vfeller
