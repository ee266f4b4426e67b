#include "vfeller/fracapprox.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "vfeller/errors.hpp"
#include "vfeller/quadrature.hpp"
#include "vfeller/special.hpp"

namespace vfeller {

namespace {

constexpr int kMaxOrder = 12;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha", "alpha must lie in (0, 1)");
}

double mixing_norm(double alpha) {
  return 1.0 / (special::gamma(alpha) * special::gamma(1.0 - alpha));
}

// Monic shifted Legendre polynomials on [0, 1]: pi_{k+1} = (t - 1/2) pi_k - b_k pi_{k-1}.
double legendre_b(int k) {
  if (k == 0) return 1.0;
  const double kk = static_cast<double>(k) * k;
  return kk / (4.0 * (4.0 * kk - 1.0));
}

void monic_legendre(double t, int n, std::vector<double>& out) {
  out.assign(n, 0.0);
  out[0] = 1.0;
  if (n > 1) out[1] = t - 0.5;
  for (int k = 1; k + 1 < n; ++k) out[k + 1] = (t - 0.5) * out[k] - legendre_b(k) * out[k - 1];
}

// Recurrence coefficients from modified moments (modified Chebyshev algorithm),
// then nodes and weights from the symmetric Jacobi matrix.
GaussRule gauss_from_moments(const std::vector<double>& nu, int q, double lo, double h) {
  const int n2 = 2 * q;
  std::vector<double> alpha(q), beta(q);
  std::vector<double> sig_prev2(n2, 0.0), sig_prev(nu), sig(n2, 0.0);
  alpha[0] = 0.5 + nu[1] / nu[0];
  beta[0] = nu[0];
  for (int k = 1; k < q; ++k) {
    for (int l = k; l < n2 - k; ++l) {
      sig[l] = sig_prev[l + 1] - (alpha[k - 1] - 0.5) * sig_prev[l] -
               beta[k - 1] * sig_prev2[l] + legendre_b(l) * sig_prev[l - 1];
    }
    alpha[k] = 0.5 + sig[k + 1] / sig[k] - sig_prev[k] / sig_prev[k - 1];
    beta[k] = sig[k] / sig_prev[k - 1];
    if (!(beta[k] > 0.0) || !std::isfinite(beta[k])) {
      std::ostringstream msg;
      msg << "Gauss rule of order " << q << " on [" << lo << ", " << lo + h
          << "] is ill-conditioned (recurrence coefficient " << beta[k]
          << "); use a smaller q or refine the nodes";
      throw NumericError(msg.str(), beta[k]);
    }
    sig_prev2 = sig_prev;
    sig_prev = sig;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 0; k < q; ++k) {
    J(k, k) = alpha[k];
    if (k + 1 < q) {
      J(k, k + 1) = std::sqrt(beta[k + 1]);
      J(k + 1, k) = J(k, k + 1);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw NumericError("Jacobi matrix eigensolver failed", 0.0);
  GaussRule rule;
  for (int j = 0; j < q; ++j) {
    const double v0 = es.eigenvectors()(0, j);
    rule.nodes.push_back(lo + h * es.eigenvalues()(j));
    rule.weights.push_back(beta[0] * v0 * v0);
  }
  return rule;
}

void check_order(int q) {
  if (q < 1 || q > kMaxOrder) throw ValidationError("q", "quadrature order must lie in [1, 12]");
}

void check_interval(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw ValidationError("nodes", "intervals need 0 <= lo < hi < inf");
  }
}

}  // namespace

std::vector<double> geometric_nodes(double xi1, double ratio, int N) {
  if (!(xi1 > 0.0)) throw ValidationError("xi1", "first node must be positive");
  if (!(ratio > 1.0)) throw ValidationError("ratio", "geometric ratio must exceed 1");
  if (N < 1) throw ValidationError("N", "need at least one interval");
  std::vector<double> nodes{0.0, xi1};
  for (int n = 2; n <= N; ++n) nodes.push_back(nodes.back() * ratio);
  return nodes;
}

ApproxScheme ApproxScheme::truncation(double alpha, double T) {
  check_alpha(alpha);
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "T must be positive");
  return ApproxScheme(alpha, TruncationScheme{T});
}

ApproxScheme ApproxScheme::quadrature(double alpha, std::vector<double> nodes, int q,
                                      QuadratureWeight weight) {
  check_alpha(alpha);
  check_order(q);
  if (nodes.size() < 2) throw ValidationError("nodes", "need at least two nodes");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) check_interval(nodes[i], nodes[i + 1]);
  if (weight == QuadratureWeight::GeometricBB2 && nodes.front() != 0.0) {
    throw ValidationError("nodes", "the geometric scheme starts at xi_0 = 0");
  }
  return ApproxScheme(alpha, QuadratureScheme{std::move(nodes), q, weight});
}

ApproxScheme ApproxScheme::geometric(double alpha, double xi1, double ratio, int N, int q,
                                     QuadratureWeight weight) {
  return quadrature(alpha, geometric_nodes(xi1, ratio, N), q, weight);
}

GaussRule fractional_gauss_rule(double alpha, double lo, double hi, int q) {
  check_alpha(alpha);
  check_order(q);
  check_interval(lo, hi);
  const double h = hi - lo;
  const double e = 1.0 - alpha;
  const double norm = mixing_norm(alpha);
  const double ulo = std::pow(lo, e);
  const double uhi = std::pow(hi, e);
  // nu_0 and nu_1 in closed form; the rest by quadrature after x = u^{1/(1-alpha)},
  // which makes the integrand smooth down to x = 0.
  std::vector<double> nu(2 * q);
  nu[0] = norm * (uhi - ulo) / e;
  const double m1 = norm * (std::pow(hi, 2.0 - alpha) - std::pow(lo, 2.0 - alpha)) / (2.0 - alpha);
  if (2 * q > 1) nu[1] = (m1 - lo * nu[0]) / h - 0.5 * nu[0];
  std::vector<double> pis;
  for (int k = 2; k < 2 * q; ++k) {
    auto f = [&](double u) {
      const double x = std::pow(u, 1.0 / e);
      monic_legendre((x - lo) / h, k + 1, pis);
      return pis[k];
    };
    quad::Options opt;
    opt.rel_tol = 1e-14;
    opt.abs_tol = 1e-17 * std::abs(uhi - ulo) * std::ldexp(1.0, -2 * k);
    opt.max_subdivisions = 4000;
    quad::Result r = quad::integrate(f, ulo, uhi, opt);
    nu[k] = norm * r.value / e;
  }
  return gauss_from_moments(nu, q, lo, h);
}

GaussRule unit_gauss_rule(double lo, double hi, int q) {
  check_order(q);
  check_interval(lo, hi);
  std::vector<double> nu(2 * q, 0.0);
  nu[0] = hi - lo;
  return gauss_from_moments(nu, q, lo, hi - lo);
}

KernelSpec truncation_kernel(double alpha, double T) {
  ApproxScheme::truncation(alpha, T);
  return KernelSpec::truncated_fractional(alpha, T);
}

KernelSpec gaussian_quadrature_kernel(const ApproxScheme& scheme) {
  const auto* qs = std::get_if<QuadratureScheme>(&scheme.kind());
  if (!qs) throw PreconditionError("gaussian_quadrature_kernel needs a quadrature scheme");
  std::vector<double> m;
  std::vector<double> x;
  for (std::size_t n = 0; n + 1 < qs->nodes.size(); ++n) {
    const double lo = qs->nodes[n];
    const double hi = qs->nodes[n + 1];
    const bool fractional = qs->weight == QuadratureWeight::FractionalWeight || n == 0;
    GaussRule r = fractional ? fractional_gauss_rule(scheme.alpha(), lo, hi, qs->q)
                             : unit_gauss_rule(lo, hi, qs->q);
    for (int j = 0; j < qs->q; ++j) {
      m.push_back(r.weights[j]);
      x.push_back(r.nodes[j]);
    }
  }
  return KernelSpec::sum_of_exponentials(std::move(m), std::move(x));
}

KernelSpec build_kernel(const ApproxScheme& scheme) {
  if (const auto* t = std::get_if<TruncationScheme>(&scheme.kind())) {
    return truncation_kernel(scheme.alpha(), t->T);
  }
  return gaussian_quadrature_kernel(scheme);
}

KernelScalars analytic_scalars(const ApproxScheme& scheme) {
  const double a = scheme.alpha();
  const double g0 = special::gamma(a) * special::gamma(2.0 - a);
  const double g1 = (2.0 - a) * special::gamma(a) * special::gamma(1.0 - a);
  auto frac_k0 = [&](double lo, double hi) { return (std::pow(hi, 1.0 - a) - std::pow(lo, 1.0 - a)) / g0; };
  auto frac_kp0 = [&](double lo, double hi) {
    return -(std::pow(hi, 2.0 - a) - std::pow(lo, 2.0 - a)) / g1;
  };
  if (const auto* t = std::get_if<TruncationScheme>(&scheme.kind())) {
    return KernelScalars{frac_k0(0.0, t->T), frac_kp0(0.0, t->T), true};
  }
  const auto& qs = std::get<QuadratureScheme>(scheme.kind());
  const double x0 = qs.nodes.front();
  const double xN = qs.nodes.back();
  if (qs.weight == QuadratureWeight::FractionalWeight) {
    return KernelScalars{frac_k0(x0, xN), frac_kp0(x0, xN), true};
  }
  const double x1 = qs.nodes[1];
  return KernelScalars{frac_k0(0.0, x1) + (xN - x1), frac_kp0(0.0, x1) - 0.5 * (xN * xN - x1 * x1),
                       true};
}

double fractional_kernel(double alpha, double t) {
  if (!(t > 0.0)) throw DomainError("the fractional kernel is singular at t = 0");
  return std::pow(t, alpha - 1.0) / special::gamma(alpha);
}

std::vector<ApproxErrorRow> approximation_error(const ApproxScheme& scheme,
                                                const std::vector<double>& t_grid) {
  for (double t : t_grid) {
    if (!(t > 0.0)) throw DomainError("approximation error grid must exclude t = 0");
  }
  const KernelSpec k = build_kernel(scheme);
  std::vector<ApproxErrorRow> rows;
  for (double t : t_grid) {
    ApproxErrorRow r;
    r.t = t;
    r.approx = eval(k, t);
    r.exact = fractional_kernel(scheme.alpha(), t);
    r.abs_error = std::abs(r.approx - r.exact);
    r.rel_error = r.abs_error / std::abs(r.exact);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace vfeller
