#include "vfeller/scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "vfeller/errors.hpp"
#include "vfeller/quadrature.hpp"

namespace vfeller {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_pow(double y, double e) {
  const double m = std::pow(std::abs(y), e);
  return y < 0.0 ? -m : m;
}

// ---------------------------------------------------------------------------
// log p'_c in closed form. `s` is the shift active on the side of x.

double closed_cir(const ScaleContext& ctx, const CIRParams& p, double x, double s) {
  const double k0 = ctx.kernel().k0;
  const double rho0 = ctx.kernel().ratio();
  const double C = 2.0 / (k0 * k0 * p.sigma * p.sigma);
  const double c = ctx.c();
  return -C * ((rho0 - k0 * p.kappa) * (x - c) + (k0 * p.kappa * p.theta + s * rho0) * std::log(x / c));
}

double jacobi_A(const ScaleContext& ctx, const JacobiParams& p, double s) {
  const double k0 = ctx.kernel().k0;
  return (k0 * p.kappa * (p.theta - p.a) + ctx.kernel().ratio() * (p.a + s)) / (p.b - p.a);
}

double jacobi_B(const ScaleContext& ctx, const JacobiParams& p, double s) {
  const double k0 = ctx.kernel().k0;
  return (k0 * p.kappa * (p.theta - p.b) + ctx.kernel().ratio() * (p.b + s)) / (p.b - p.a);
}

double jacobi_C(const ScaleContext& ctx, const JacobiParams& p) {
  const double k0 = ctx.kernel().k0;
  return 2.0 / (k0 * k0 * p.sigma * p.sigma);
}

double closed_jacobi(const ScaleContext& ctx, const JacobiParams& p, double x, double s) {
  const double c = ctx.c();
  const double A = jacobi_A(ctx, p, s);
  const double B = jacobi_B(ctx, p, s);
  return -jacobi_C(ctx, p) *
         (A * std::log((x - p.a) / (c - p.a)) - B * std::log((p.b - x) / (p.b - c)));
}

double closed_power(const ScaleContext& ctx, const PowerParams& p, double x, double s) {
  const double k0 = ctx.kernel().k0;
  const double rho0 = ctx.kernel().ratio();
  const double C = 2.0 / (k0 * k0 * p.sigma * p.sigma);
  const double e1 = p.alpha - p.delta + 1.0;
  const double e2 = 2.0 - p.delta;
  const double e3 = 1.0 - p.delta;
  const double c = ctx.c();
  const double g1 = (signed_pow(x, e1) - signed_pow(c, e1)) / e1;
  const double g2 = (std::pow(std::abs(x), e2) - std::pow(std::abs(c), e2)) / e2;
  const double g3 = (signed_pow(x, e3) - signed_pow(c, e3)) / e3;
  return -C * (k0 * g1 + rho0 * g2 + rho0 * s * g3);
}

bool has_closed_form(const ScaleContext& ctx) {
  return ctx.options().closed_form && !ctx.model().is_custom();
}

double closed_form_log_pprime(const ScaleContext& ctx, double x) {
  const double s = ctx.shift_at(x);
  const auto& f = ctx.model().family();
  if (auto* p = std::get_if<CIRParams>(&f)) return closed_cir(ctx, *p, x, s);
  if (auto* p = std::get_if<JacobiParams>(&f)) return closed_jacobi(ctx, *p, x, s);
  return closed_power(ctx, std::get<PowerParams>(f), x, s);
}

// -2 int_a^y b~_c(z; s) / sigma~^2(z) dz with the shift s fixed on the side of integration.
double exponent_increment(const ScaleContext& ctx, double a, double y, double s) {
  if (a == y) return 0.0;
  const double ratio = ctx.kernel().ratio();
  auto integrand = [&](double z) {
    const double sd = ctx.modified_diffusion(z);
    return (ctx.modified_drift(z) + ratio * s) / (sd * sd);
  };
  quad::Options opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = std::min(ctx.options().quad_tol, 1e-12);
  opt.max_subdivisions = ctx.options().max_subdivisions;
  auto run = [&](double lo, double hi) {
    quad::Result r = quad::integrate(integrand, lo, hi, opt);
    if (!r.finite) {
      std::ostringstream msg;
      msg << "scale exponent integrand is not finite on [" << std::min(lo, hi) << ", "
          << std::max(lo, hi) << "]";
      throw NumericError(msg.str(), r.abs_error);
    }
    return r.value;
  };
  double total = 0.0;
  // A zero of the diffusion between a and y (power family with delta > 0) is an
  // integrable singularity; splitting there keeps the rule away from it.
  if (a < 0.0 && y > 0.0) {
    total = run(a, 0.0) + run(0.0, y);
  } else if (a > 0.0 && y < 0.0) {
    total = run(a, 0.0) + run(0.0, y);
  } else {
    total = run(a, y);
  }
  return -2.0 * total;
}

void require_interior(const ScaleContext& ctx, double x) {
  if (!ctx.model().contains(x)) {
    std::ostringstream msg;
    msg << "x = " << x << " is not inside the open state interval";
    throw DomainError(msg.str());
  }
}

// ---------------------------------------------------------------------------
// log p' along the ray y = c + s u, u >= 0, evaluated either in closed form or
// by quadrature from a nearby anchor whose log p' is already known.

class Ray {
 public:
  Ray(const ScaleContext& ctx, int s)
      : ctx_(ctx), s_(s), closed_(has_closed_form(ctx)), shift_(s < 0 ? ctx.beta() : ctx.gamma()) {}

  double y(double u) const { return ctx_.c() + s_ * u; }

  double log_pprime(double u, double ua, double La) const {
    if (closed_) return closed_form_log_pprime(ctx_, y(u));
    return La + exponent_increment(ctx_, y(ua), y(u), shift_);
  }

  double inv_sigma2(double u) const {
    const double sd = ctx_.modified_diffusion(y(u));
    return 1.0 / (sd * sd);
  }

  int sign() const { return s_; }
  const ScaleContext& ctx() const { return ctx_; }

 private:
  const ScaleContext& ctx_;
  int s_;
  bool closed_;
  double shift_;
};

// ---------------------------------------------------------------------------
// Progressive integration outward from c. In P mode accumulates int_0^u p' du;
// in V mode accumulates 2 int_0^u J du with J(u) = p'(u) int_0^u du'/(p' sigma~^2),
// carried in the scaled form so neither factor over- or underflows alone.

class Walker {
 public:
  enum class Mode { P, V };

  Walker(const ScaleContext& ctx, int s, Mode mode) : ray_(ctx, s), mode_(mode) {
    tol_ = ctx.options().quad_tol;
    max_panels_ = ctx.options().max_subdivisions;
  }

  double u() const { return u_; }
  double log_pprime() const { return L_; }
  double scaled_inner() const { return J_; }
  double total() const { return total_; }
  bool overflowed() const { return overflow_; }

  double advance(double target) {
    if (target < u_) throw PreconditionError("walker cannot move backwards");
    if (overflow_ || target == u_) return total_;
    const double span = target - u_;
    constexpr int kInitial = 8;
    struct Seg {
      double a, b;
      int depth;
    };
    std::vector<Seg> stack;
    for (int i = kInitial - 1; i >= 0; --i) {
      const double a = u_ + span * i / kInitial;
      const double b = (i == kInitial - 1) ? target : u_ + span * (i + 1) / kInitial;
      stack.push_back({a, b, 0});
    }
    int panels = 0;
    while (!stack.empty()) {
      Seg seg = stack.back();
      stack.pop_back();
      const bool force = panels >= max_panels_ || seg.depth > 60 ||
                         !(0.5 * (seg.a + seg.b) > seg.a && 0.5 * (seg.a + seg.b) < seg.b);
      const bool ok = (mode_ == Mode::P) ? panel_p(seg.a, seg.b, span, force)
                                         : panel_v(seg.a, seg.b, span, force);
      ++panels;
      if (overflow_) {
        total_ = kInf;
        return total_;
      }
      if (!ok) {
        const double mid = 0.5 * (seg.a + seg.b);
        stack.push_back({mid, seg.b, seg.depth + 1});
        stack.push_back({seg.a, mid, seg.depth + 1});
      }
    }
    u_ = target;
    return total_;
  }

 private:
  bool acceptable(double err, double value, double width, double span) const {
    const double scale = std::max(std::abs(value), std::abs(total_) * width / span);
    return err <= tol_ * scale || err < 1e-300;
  }

  bool panel_p(double a, double b, double span, bool force) {
    const double La = L_;
    auto f = [&](double uu) { return std::exp(ray_.log_pprime(uu, a, La)); };
    quad::Panel pn = quad::gauss_kronrod21(f, a, b);
    if (std::isnan(pn.value)) throw NumericError("scale function integrand produced NaN", kInf);
    if (!pn.finite) {
      overflow_ = true;
      return true;
    }
    if (!force && !acceptable(pn.error, pn.value, b - a, span)) return false;
    total_ += pn.value;
    L_ = ray_.log_pprime(b, a, La);
    if (!std::isfinite(total_)) overflow_ = true;
    return true;
  }

  // Inner GK21 of exp(Lt - L(z)) / sigma~^2(z) over [a, t].
  quad::Panel inner(double a, double t, double Lt, double La) const {
    auto h = [&](double z) {
      return std::exp(Lt - ray_.log_pprime(z, a, La)) * ray_.inv_sigma2(z);
    };
    return quad::gauss_kronrod21(h, a, t);
  }

  bool panel_v(double a, double b, double span, bool force) {
    const double La = L_;
    const double Ja = J_;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double resk = 0.0;
    double resg = 0.0;
    double inner_err = 0.0;
    auto node_value = [&](double t, double& inner_e) {
      const double Lt = ray_.log_pprime(t, a, La);
      quad::Panel in = inner(a, t, Lt, La);
      inner_e = in.error;
      const double carried = Ja == 0.0 ? 0.0 : std::exp(Lt - La) * Ja;
      return carried + in.value;
    };
    double e0 = 0.0;
    const double fc = node_value(center, e0);
    resk = fc * quad::detail::kWgk[10];
    inner_err += quad::detail::kWgk[10] * e0;
    for (int j = 0; j < 10; ++j) {
      const double dx = half * quad::detail::kXgk[j];
      double e1 = 0.0;
      double e2 = 0.0;
      const double f1 = node_value(center - dx, e1);
      const double f2 = node_value(center + dx, e2);
      resk += quad::detail::kWgk[j] * (f1 + f2);
      inner_err += quad::detail::kWgk[j] * (e1 + e2);
      if (j % 2 == 1) resg += quad::detail::kWg[j / 2] * (f1 + f2);
    }
    const double value = 2.0 * resk * half;
    if (std::isnan(value)) throw NumericError("test function integrand produced NaN", kInf);
    if (!std::isfinite(value)) {
      overflow_ = true;
      return true;
    }
    const double err = 2.0 * half * (std::abs(resk - resg) + inner_err);
    if (!force && !acceptable(err, value, b - a, span)) return false;
    const double Lb = ray_.log_pprime(b, a, La);
    const quad::Panel in = inner(a, b, Lb, La);
    const double Jb = (Ja == 0.0 ? 0.0 : std::exp(Lb - La) * Ja) + in.value;
    total_ += value;
    L_ = Lb;
    J_ = Jb;
    if (!std::isfinite(total_) || !std::isfinite(J_)) overflow_ = true;
    return true;
  }

  Ray ray_;
  Mode mode_;
  double tol_ = 1e-10;
  int max_panels_ = 4000;
  double u_ = 0.0;
  double L_ = 0.0;
  double J_ = 0.0;
  double total_ = 0.0;
  bool overflow_ = false;
};

int side_of(const ScaleContext& ctx, double x) { return x < ctx.c() ? -1 : 1; }

// ---------------------------------------------------------------------------
// u-series on a panel mesh with Gauss-Legendre nodes.

struct SpectralPanel {
  std::vector<double> nodes;    // unit nodes
  std::vector<double> weights;  // unit weights
  std::vector<std::vector<double>> S;  // S[i][j] = int_0^{nodes[i]} l_j(s) ds
};

SpectralPanel make_spectral(int q) {
  SpectralPanel sp;
  quad::Rule r = quad::gauss_legendre_unit(q);
  sp.nodes = r.nodes;
  sp.weights = r.weights;
  sp.S.assign(q, std::vector<double>(q, 0.0));
  auto lagrange = [&](int j, double s) {
    double v = 1.0;
    for (int m = 0; m < q; ++m) {
      if (m != j) v *= (s - sp.nodes[m]) / (sp.nodes[j] - sp.nodes[m]);
    }
    return v;
  };
  for (int i = 0; i < q; ++i) {
    const double ti = sp.nodes[i];
    for (int j = 0; j < q; ++j) {
      double acc = 0.0;
      for (int k = 0; k < q; ++k) acc += r.weights[k] * lagrange(j, ti * r.nodes[k]);
      sp.S[i][j] = ti * acc;
    }
  }
  return sp;
}

// Sum of u_{c,k}(x) for k = 2..n_terms on a mesh of `m` panels.
double higher_terms(const ScaleContext& ctx, double x, int n_terms, int m, const SpectralPanel& sp) {
  const int s = side_of(ctx, x);
  const double U = std::abs(x - ctx.c());
  Ray ray(ctx, s);
  // Grade the mesh toward x when a finite endpoint is close to it.
  const double boundary = s < 0 ? ctx.model().l() : ctx.model().r();
  const double d = std::abs(boundary - x);
  std::vector<double> edges(m + 1);
  if (std::isfinite(boundary) && d < U) {
    for (int k = 0; k <= m; ++k) {
      const double w = (d + U) * std::pow(d / (d + U), static_cast<double>(k) / m);
      edges[k] = (d + U) - w;
    }
  } else if (!(ray.inv_sigma2(U * 1e-12) < 1e3 * ray.inv_sigma2(0.5 * U))) {
    // Diffusion vanishes at c: dyadic panels on (0, U/2], uniform beyond.
    const int g = std::min(m / 2, 120);
    for (int k = 1; k <= g; ++k) edges[k] = 0.5 * U * std::ldexp(1.0, k - g);
    for (int k = g; k <= m; ++k) edges[k] = 0.5 * U * (1.0 + static_cast<double>(k - g) / (m - g));
  } else {
    for (int k = 0; k <= m; ++k) edges[k] = U * k / m;
  }
  edges[0] = 0.0;
  edges[m] = U;
  const int q = static_cast<int>(sp.nodes.size());
  // Node data.
  std::vector<double> Lnode(static_cast<std::size_t>(m) * q);
  std::vector<double> inv_s2(static_cast<std::size_t>(m) * q);
  std::vector<double> Ledge(m + 1);
  Ledge[0] = 0.0;
  for (int p = 0; p < m; ++p) {
    const double a = edges[p];
    const double h = edges[p + 1] - a;
    for (int i = 0; i < q; ++i) {
      const double t = a + h * sp.nodes[i];
      Lnode[p * q + i] = ray.log_pprime(t, a, Ledge[p]);
      inv_s2[p * q + i] = ray.inv_sigma2(t);
    }
    Ledge[p + 1] = ray.log_pprime(edges[p + 1], a, Ledge[p]);
  }
  std::vector<double> f(static_cast<std::size_t>(m) * q, 1.0);  // u_{k-1} at nodes
  std::vector<double> next(f.size());
  std::vector<double> Jn(q);
  double sum = 0.0;
  for (int term = 1; term <= n_terms; ++term) {
    double Ja = 0.0;
    double Ga = 0.0;
    for (int p = 0; p < m; ++p) {
      const double a = edges[p];
      const double h = edges[p + 1] - a;
      const double La = Ledge[p];
      for (int i = 0; i < q; ++i) {
        const double Li = Lnode[p * q + i];
        double acc = 0.0;
        for (int j = 0; j < q; ++j) {
          acc += sp.S[i][j] * std::exp(Li - Lnode[p * q + j]) * f[p * q + j] * inv_s2[p * q + j];
        }
        Jn[i] = (Ja == 0.0 ? 0.0 : std::exp(Li - La) * Ja) + h * acc;
      }
      for (int i = 0; i < q; ++i) {
        double acc = 0.0;
        for (int j = 0; j < q; ++j) acc += sp.S[i][j] * Jn[j];
        next[p * q + i] = Ga + 2.0 * h * acc;
      }
      const double Lb = Ledge[p + 1];
      double jb = 0.0;
      double gb = 0.0;
      for (int j = 0; j < q; ++j) {
        jb += sp.weights[j] * std::exp(Lb - Lnode[p * q + j]) * f[p * q + j] * inv_s2[p * q + j];
        gb += sp.weights[j] * Jn[j];
      }
      Ja = (Ja == 0.0 ? 0.0 : std::exp(Lb - La) * Ja) + h * jb;
      Ga += 2.0 * h * gb;
    }
    if (term >= 2) sum += Ga;
    if (!std::isfinite(sum)) return kInf;
    f.swap(next);
  }
  return sum;
}

// ---------------------------------------------------------------------------

std::optional<LimitKind> closed_form_limit(const ScaleContext& ctx, BoundarySide side,
                                           std::string& reason) {
  if (!ctx.options().limit.closed_form || ctx.model().is_custom()) return std::nullopt;
  const auto& fam = ctx.model().family();
  const double k0 = ctx.kernel().k0;
  const double rho0 = ctx.kernel().ratio();
  std::ostringstream why;
  std::optional<LimitKind> out;
  if (auto* p = std::get_if<CIRParams>(&fam)) {
    if (side == BoundarySide::Left) {
      const double C = 2.0 / (k0 * k0 * p->sigma * p->sigma);
      const double q = C * (k0 * p->kappa * p->theta + ctx.beta() * rho0);
      why << "exponent at 0: " << q << " (diverges iff >= 1)";
      out = q >= 1.0 ? LimitKind::Divergent : LimitKind::Finite;
    } else {
      why << "p' grows exponentially at infinity";
      out = LimitKind::Divergent;
    }
  } else if (auto* p = std::get_if<JacobiParams>(&fam)) {
    const double C = jacobi_C(ctx, *p);
    if (side == BoundarySide::Left) {
      const double ac = jacobi_A(ctx, *p, ctx.beta()) * C;
      why << "A C = " << ac << " (diverges iff >= 1)";
      out = ac >= 1.0 ? LimitKind::Divergent : LimitKind::Finite;
    } else {
      const double bc = jacobi_B(ctx, *p, ctx.gamma()) * C;
      why << "B C = " << bc << " (diverges iff <= -1)";
      out = bc <= -1.0 ? LimitKind::Divergent : LimitKind::Finite;
    }
  } else {
    if (side == BoundarySide::Left) {
      why << "p' grows super-exponentially at -infinity";
      out = LimitKind::Divergent;
    } else {
      why << "p' decays super-exponentially at +infinity; p' I ~ x^-alpha with alpha > 1";
      out = LimitKind::Finite;
    }
  }
  reason = why.str();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ScaleContext::ScaleContext(ModelSpec model, KernelScalars kernel, double c, double beta,
                           double gamma, ScaleOptions options)
    : model_(std::move(model)), kernel_(kernel), c_(c), beta_(beta), gamma_(gamma),
      options_(options) {
  if (!std::isfinite(c) || !model_.contains(c)) {
    throw ValidationError("c", "base point must lie strictly inside the state interval");
  }
  if (!std::isfinite(beta)) throw ValidationError("beta", "shift must be finite");
  if (!std::isfinite(gamma)) throw ValidationError("gamma", "shift must be finite");
  if (!(kernel_.k0 > 0.0)) throw ValidationError("K0", "K(0) must be positive");
  if (!(kernel_.kp0 <= 0.0)) throw ValidationError("Kp0", "K'(0) must be nonpositive");
  if (!(options_.quad_tol > 0.0)) throw ValidationError("quad_tol", "must be positive");
  if (options_.max_subdivisions < 1) throw ValidationError("max_subdivisions", "must be positive");
  const LimitOptions& lo = options_.limit;
  if (!(lo.cap > 0.0)) throw ValidationError("cap", "must be positive");
  if (lo.finite_steps < lo.window + 2 || lo.infinite_steps < lo.window + 2) {
    throw ValidationError("steps", "need more samples than the ratio window");
  }
}

ScaleContext::ScaleContext(ModelSpec model, const KernelSpec& kernel, double c, double beta,
                           double gamma, ScaleOptions options)
    : ScaleContext(std::move(model), k0_kprime0(kernel), c, beta, gamma, options) {}

ScaleContext ScaleContext::with_shifts(double beta, double gamma) const {
  return ScaleContext(model_, kernel_, c_, beta, gamma, options_);
}

ScaleContext ScaleContext::with_base(double c) const {
  return ScaleContext(model_, kernel_, c, beta_, gamma_, options_);
}

ScaleContext ScaleContext::with_options(ScaleOptions options) const {
  return ScaleContext(model_, kernel_, c_, beta_, gamma_, options);
}

double ScaleContext::modified_drift(double x) const {
  return kernel_.k0 * model_.drift(x) + kernel_.ratio() * x;
}

double ScaleContext::modified_diffusion(double x) const {
  return kernel_.k0 * model_.diffusion(x);
}

double ScaleContext::shifted_drift(double x) const {
  return modified_drift(x) + kernel_.ratio() * shift_at(x);
}

double log_scale_derivative(const ScaleContext& ctx, double x) {
  require_interior(ctx, x);
  if (x == ctx.c()) return 0.0;
  if (has_closed_form(ctx)) return closed_form_log_pprime(ctx, x);
  return exponent_increment(ctx, ctx.c(), x, ctx.shift_at(x));
}

double log_scale_derivative_generic(const ScaleContext& ctx, double x) {
  require_interior(ctx, x);
  if (x == ctx.c()) return 0.0;
  return exponent_increment(ctx, ctx.c(), x, ctx.shift_at(x));
}

double scale_derivative(const ScaleContext& ctx, double x) {
  return std::exp(log_scale_derivative(ctx, x));
}

double scale(const ScaleContext& ctx, double x) {
  require_interior(ctx, x);
  if (x == ctx.c()) return 0.0;
  const int s = side_of(ctx, x);
  Walker w(ctx, s, Walker::Mode::P);
  const double t = w.advance(std::abs(x - ctx.c()));
  return s * t;
}

double v(const ScaleContext& ctx, double x) {
  require_interior(ctx, x);
  if (x == ctx.c()) return 0.0;
  Walker w(ctx, side_of(ctx, x), Walker::Mode::V);
  return w.advance(std::abs(x - ctx.c()));
}

double inner_integral(const ScaleContext& ctx, double x) {
  require_interior(ctx, x);
  if (x == ctx.c()) return 0.0;
  const int s = side_of(ctx, x);
  Walker w(ctx, s, Walker::Mode::V);
  w.advance(std::abs(x - ctx.c()));
  if (w.overflowed()) return s * kInf;
  return s * w.scaled_inner() * std::exp(-w.log_pprime());
}

double v_derivative(const ScaleContext& ctx, double x) {
  require_interior(ctx, x);
  if (x == ctx.c()) return 0.0;
  const int s = side_of(ctx, x);
  Walker w(ctx, s, Walker::Mode::V);
  w.advance(std::abs(x - ctx.c()));
  if (w.overflowed()) return s * kInf;
  return 2.0 * s * w.scaled_inner();
}

double u_series(const ScaleContext& ctx, double x, int n_terms) {
  if (n_terms < 1) throw ValidationError("n_terms", "need at least one term");
  require_interior(ctx, x);
  if (x == ctx.c()) return 1.0;
  const double first = v(ctx, x);
  if (!std::isfinite(first)) return kInf;
  if (n_terms == 1) return 1.0 + first;
  static const SpectralPanel sp = make_spectral(12);
  const double tol = std::max(ctx.options().quad_tol, 1e-13);
  double prev = higher_terms(ctx, x, n_terms, 4, sp);
  for (int m = 8; m <= 4096; m *= 2) {
    const double cur = higher_terms(ctx, x, n_terms, m, sp);
    if (!std::isfinite(cur)) return kInf;
    if (std::abs(cur - prev) <= tol * std::max(std::abs(cur), 1e-300) ||
        std::abs(cur - prev) <= 1e-15 * (1.0 + first)) {
      return 1.0 + first + cur;
    }
    prev = cur;
  }
  throw NumericError("u series mesh refinement did not converge", std::abs(prev));
}

// ---------------------------------------------------------------------------

const char* to_string(LimitKind k) {
  switch (k) {
    case LimitKind::Finite: return "Finite";
    case LimitKind::Divergent: return "Divergent";
    default: return "Inconclusive";
  }
}

const char* to_string(BoundarySide s) { return s == BoundarySide::Left ? "left" : "right"; }

LimitClassification classify_sequence(const std::vector<double>& points,
                                      const std::vector<double>& samples, const LimitOptions& opt,
                                      double tail_tol) {
  LimitClassification out;
  out.points = points;
  out.samples = samples;
  for (double s : samples) {
    if (!std::isfinite(s) || s > opt.cap) {
      out.kind = LimitKind::Divergent;
      out.value = kInf;
      out.reason = std::isfinite(s) ? "sample exceeded the divergence cap" : "integral overflowed";
      return out;
    }
  }
  const int n = static_cast<int>(samples.size());
  if (n < opt.window + 2) {
    out.reason = "too few samples";
    return out;
  }
  std::vector<double> inc(n - 1);
  for (int k = 1; k < n; ++k) inc[k - 1] = samples[k] - samples[k - 1];
  const double last = samples.back();
  bool tail_small = true;
  for (int k = n - 1 - opt.window; k < n - 1; ++k) {
    if (std::abs(inc[k]) > tail_tol * std::max(std::abs(last), 1e-300)) tail_small = false;
  }
  std::vector<double> ratios;
  for (int k = n - 1 - opt.window; k < n - 1; ++k) {
    const double prev = inc[k - 1];
    const double cur = inc[k];
    if (prev == 0.0) {
      ratios.push_back(cur == 0.0 ? 0.0 : kInf);
    } else {
      ratios.push_back(cur / prev);
    }
  }
  const bool contracting = std::all_of(ratios.begin(), ratios.end(), [&](double r) {
    return r >= -opt.finite_ratio && r <= opt.finite_ratio;
  });
  const bool sustained =
      std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r >= opt.divergent_ratio; }) &&
      inc.back() > 0.0;
  std::ostringstream why;
  why << "trailing increment ratios:";
  for (double r : ratios) why << ' ' << r;
  out.reason = why.str();
  if (contracting || tail_small) {
    out.kind = LimitKind::Finite;
    const double r = ratios.back();
    out.value = (r > 0.0 && r < 1.0) ? last + inc.back() * r / (1.0 - r) : last;
  } else if (sustained) {
    out.kind = LimitKind::Divergent;
    out.value = kInf;
  }
  return out;
}

LimitClassification boundary_limit(const ScaleContext& ctx, BoundarySide side, LimitTarget target) {
  std::string reason;
  const std::optional<LimitKind> exact = closed_form_limit(ctx, side, reason);
  if (exact && *exact == LimitKind::Divergent) {
    LimitClassification out;
    out.kind = LimitKind::Divergent;
    out.value = kInf;
    out.closed_form = true;
    out.reason = reason;
    return out;
  }
  const LimitOptions& opt = ctx.options().limit;
  const int s = side == BoundarySide::Left ? -1 : 1;
  const double boundary = s < 0 ? ctx.model().l() : ctx.model().r();
  const double c = ctx.c();
  std::vector<double> us;
  std::vector<double> xs;
  if (std::isfinite(boundary)) {
    const double width = std::abs(c - boundary);
    for (int k = 1; k <= opt.finite_steps; ++k) {
      const double h = width * std::ldexp(1.0, -k);
      xs.push_back(boundary - s * h);
      us.push_back(width - h);
    }
  } else {
    int k0 = 0;
    while (std::ldexp(1.0, k0) <= std::abs(c) + 0.5) ++k0;
    for (int k = k0; k < k0 + opt.infinite_steps; ++k) {
      const double x = s * std::ldexp(1.0, k);
      xs.push_back(x);
      us.push_back(std::abs(x - c));
    }
  }
  Walker w(ctx, s, target == LimitTarget::ScaleP ? Walker::Mode::P : Walker::Mode::V);
  std::vector<double> samples;
  for (double u : us) {
    samples.push_back(std::abs(w.advance(u)));
    if (w.overflowed()) break;
  }
  xs.resize(samples.size());
  LimitClassification out = classify_sequence(xs, samples, opt, ctx.options().quad_tol);
  if (exact) {
    // Closed form says finite; keep the numeric estimate as the value.
    out.kind = *exact;
    out.closed_form = true;
    out.reason = reason + "; " + out.reason;
    if (!std::isfinite(out.value)) out.value = samples.empty() ? 0.0 : samples.back();
  }
  return out;
}

}  // namespace vfeller
