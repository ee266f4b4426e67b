#include "vfeller/feller.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vfeller/errors.hpp"
#include "vfeller/quadrature.hpp"

namespace vfeller {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> hypothesis_flags(const KernelScalars& k) {
  std::vector<std::string> out;
  out.push_back(k.hypotheses_hold ? "kernel resolvent hypotheses: hold"
                                  : "kernel resolvent hypotheses: not established");
  out.push_back(k.kp0 == 0.0 ? "constant kernel: shifts have no effect" : "K'(0) < 0");
  return out;
}

BoundaryVerdict make(Boundary b, Verdict v, std::string theorem, const KernelScalars& k) {
  BoundaryVerdict out;
  out.boundary = b;
  out.verdict = v;
  out.theorem = std::move(theorem);
  out.assumptions_checked = hypothesis_flags(k);
  return out;
}

// A decisive generic verdict requires the resolvent hypotheses.
void guard_hypotheses(BoundaryVerdict& bv, const KernelScalars& k) {
  if (!k.hypotheses_hold && bv.verdict != Verdict::Inconclusive) {
    bv.assumptions_checked.push_back("downgraded: " + std::string(to_string(bv.verdict)) +
                                     " needs the kernel hypotheses");
    bv.verdict = Verdict::Inconclusive;
  }
}


void add_limit_evidence(BoundaryVerdict& bv, const std::string& name, const LimitClassification& lc,
                        double cap) {
  bv.evidence.push_back({name, lc.kind == LimitKind::Divergent ? kInf : lc.value, cap});
}

double endpoint(const ModelSpec& m, BoundarySide s) { return s == BoundarySide::Left ? m.l() : m.r(); }

// Does v_c(x_n; -x_n) diverge as x_n approaches the endpoint on side s?
LimitClassification sufficient_side(const ScaleContext& ctx, BoundarySide side, int n_stages,
                                    std::string& how) {
  const double B = endpoint(ctx.model(), side);
  const double c = ctx.c();
  if (std::isfinite(B)) {
    LimitClassification lc = boundary_limit(ctx.with_shifts(-B, -B), side, LimitTarget::TestV);
    if (lc.kind == LimitKind::Divergent) {
      how = "finite endpoint: v at the endpoint with shift -endpoint diverges";
      return lc;
    }
  }
  std::vector<double> xs;
  std::vector<double> vals;
  const int s = side == BoundarySide::Left ? -1 : 1;
  for (int n = 1; n <= n_stages; ++n) {
    const double x = std::isfinite(B) ? B - s * std::abs(c - B) * std::ldexp(1.0, -n)
                                      : c + s * std::ldexp(1.0, n);
    const double val = v(ctx.with_shifts(-x, -x), x);
    xs.push_back(x);
    vals.push_back(val);
    if (!std::isfinite(val) || val > ctx.options().limit.cap) break;
  }
  how = "sequence v(x_n; -x_n)";
  return classify_sequence(xs, vals, ctx.options().limit, ctx.options().quad_tol);
}

// Classifies int_c^x sigma~^{-2} as x approaches the endpoint on side s.
LimitKind sigma_integrability(const ScaleContext& ctx, BoundarySide side) {
  const double B = endpoint(ctx.model(), side);
  const double c = ctx.c();
  const double width = std::abs(c - B);
  const int s = side == BoundarySide::Left ? -1 : 1;
  auto f = [&](double z) {
    const double sd = ctx.modified_diffusion(z);
    return 1.0 / (sd * sd);
  };
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-15;
  std::vector<double> xs;
  std::vector<double> vals;
  double acc = 0.0;
  double prev = c;
  for (int k = 1; k <= ctx.options().limit.finite_steps; ++k) {
    const double x = B - s * width * std::ldexp(1.0, -k);
    quad::Result r = quad::integrate(f, prev, x, opt);
    if (!r.finite) return LimitKind::Divergent;
    acc += std::abs(r.value);
    xs.push_back(x);
    vals.push_back(acc);
    prev = x;
  }
  return classify_sequence(xs, vals, ctx.options().limit, 1e-10).kind;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(10);
  o << x;
  return o.str();
}

}  // namespace

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::Left: return "Left";
    case Boundary::Right: return "Right";
    default: return "Both";
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::NoExitAS: return "NoExitAS";
    case Verdict::ExitsWithPositiveProb: return "ExitsWithPositiveProb";
    case Verdict::NecessaryHolds: return "NecessaryHolds";
    case Verdict::SupBoundedAS: return "SupBoundedAS";
    case Verdict::InfBoundedAS: return "InfBoundedAS";
    default: return "Inconclusive";
  }
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Diverging: return "diverging";
    case Regime::Vanishing: return "vanishing";
    default: return "bounded";
  }
}

bool is_decisive(Verdict v) { return v != Verdict::Inconclusive; }

double default_eps_shift(const ModelSpec& model) {
  if (model.bounded()) return 1e-6 * (model.r() - model.l());
  return 1e-6 * std::max(1.0, std::abs(model.x0()));
}

BoundaryVerdict necessary_test(const ScaleContext& ctx, double eps_shift) {
  if (!(eps_shift > 0.0) || !std::isfinite(eps_shift)) {
    throw ValidationError("eps_shift", "shift offset must be positive");
  }
  const double x0 = ctx.model().x0();
  const double beta = x0 + eps_shift;
  const double gamma = x0 - eps_shift;
  const ScaleContext shifted = ctx.with_shifts(-beta, -gamma);
  const LimitClassification left = boundary_limit(shifted, BoundarySide::Left, LimitTarget::TestV);
  const LimitClassification right = boundary_limit(shifted, BoundarySide::Right, LimitTarget::TestV);
  const bool lf = left.kind == LimitKind::Finite;
  const bool rf = right.kind == LimitKind::Finite;
  BoundaryVerdict out;
  const KernelScalars& k = ctx.kernel();
  if (lf || rf) {
    out = make(lf && rf ? Boundary::Both : (lf ? Boundary::Left : Boundary::Right),
               Verdict::ExitsWithPositiveProb, "necessary-condition-v", k);
  } else if (left.kind == LimitKind::Divergent && right.kind == LimitKind::Divergent) {
    out = make(Boundary::Both, Verdict::NecessaryHolds, "necessary-condition-v", k);
  } else {
    const bool li = left.kind == LimitKind::Inconclusive;
    const bool ri = right.kind == LimitKind::Inconclusive;
    out = make(li && ri ? Boundary::Both : (li ? Boundary::Left : Boundary::Right),
               Verdict::Inconclusive, "necessary-condition-v", k);
  }
  const double cap = ctx.options().limit.cap;
  add_limit_evidence(out, "v(l+; -(x0+eps))", left, cap);
  add_limit_evidence(out, "v(r-; -(x0-eps))", right, cap);
  out.evidence.push_back({"eps_shift", eps_shift, 0.0});
  out.assumptions_checked.push_back("left limit: " + left.reason);
  out.assumptions_checked.push_back("right limit: " + right.reason);
  guard_hypotheses(out, k);
  return out;
}

BoundaryVerdict sufficient_test(const ScaleContext& ctx, int n_stages) {
  if (n_stages < ctx.options().limit.window + 2) {
    throw ValidationError("n_stages", "need more stages than the ratio window plus one");
  }
  std::string how_l;
  std::string how_r;
  const LimitClassification l = sufficient_side(ctx, BoundarySide::Left, n_stages, how_l);
  const LimitClassification r = sufficient_side(ctx, BoundarySide::Right, n_stages, how_r);
  const bool ld = l.kind == LimitKind::Divergent;
  const bool rd = r.kind == LimitKind::Divergent;
  const KernelScalars& k = ctx.kernel();
  BoundaryVerdict out;
  if (ld || rd) {
    out = make(ld && rd ? Boundary::Both : (ld ? Boundary::Left : Boundary::Right), Verdict::NoExitAS,
               "sufficient-condition-v", k);
  } else {
    out = make(Boundary::Both, Verdict::Inconclusive, "sufficient-condition-v", k);
  }
  const double cap = ctx.options().limit.cap;
  add_limit_evidence(out, "lim v(l_n; -l_n)", l, cap);
  add_limit_evidence(out, "lim v(r_n; -r_n)", r, cap);
  out.assumptions_checked.push_back("left: " + how_l);
  out.assumptions_checked.push_back("right: " + how_r);
  guard_hypotheses(out, k);
  return out;
}

BoundaryVerdict bounded_interval_test(const ScaleContext& ctx) {
  if (!ctx.model().bounded()) {
    throw PreconditionError("bounded_interval_test needs a bounded state interval");
  }
  for (BoundarySide s : {BoundarySide::Left, BoundarySide::Right}) {
    if (sigma_integrability(ctx, s) != LimitKind::Finite) {
      throw PreconditionError(std::string("sigma~^-2 is not integrable at the ") + to_string(s) +
                              " endpoint");
    }
  }
  const ScaleContext z = ctx.with_shifts(0.0, 0.0);
  const LimitClassification l = boundary_limit(z, BoundarySide::Left, LimitTarget::TestV);
  const LimitClassification r = boundary_limit(z, BoundarySide::Right, LimitTarget::TestV);
  const KernelScalars& k = ctx.kernel();
  BoundaryVerdict out;
  const bool lf = l.kind == LimitKind::Finite;
  const bool rf = r.kind == LimitKind::Finite;
  if (l.kind == LimitKind::Divergent && r.kind == LimitKind::Divergent) {
    out = make(Boundary::Both, Verdict::NoExitAS, "bounded-interval-equivalence", k);
  } else if (lf || rf) {
    out = make(lf && rf ? Boundary::Both : (lf ? Boundary::Left : Boundary::Right),
               Verdict::ExitsWithPositiveProb, "bounded-interval-equivalence", k);
  } else {
    out = make(Boundary::Both, Verdict::Inconclusive, "bounded-interval-equivalence", k);
  }
  const double cap = ctx.options().limit.cap;
  add_limit_evidence(out, "v(l+; 0)", l, cap);
  add_limit_evidence(out, "v(r-; 0)", r, cap);
  out.assumptions_checked.push_back("sigma~^-2 integrable on the interval (checked numerically)");
  guard_hypotheses(out, k);
  return out;
}

BoundaryVerdict sup_inf_test(const ScaleContext& ctx, SupInfSide which) {
  const ModelSpec& m = ctx.model();
  const KernelScalars& k = ctx.kernel();
  const bool constant = k.kp0 == 0.0;
  const double B = which == SupInfSide::Sup ? m.r() : m.l();
  if (!std::isfinite(B) && !constant) {
    throw PreconditionError(which == SupInfSide::Sup
                                ? "sup test needs a finite right endpoint (or a constant kernel)"
                                : "inf test needs a finite left endpoint (or a constant kernel)");
  }
  const double shift = std::isfinite(B) ? -B : 0.0;
  const ScaleContext sc = ctx.with_shifts(shift, shift);
  const LimitClassification pl = boundary_limit(sc, BoundarySide::Left, LimitTarget::ScaleP);
  const LimitClassification pr = boundary_limit(sc, BoundarySide::Right, LimitTarget::ScaleP);
  BoundaryVerdict out;
  if (which == SupInfSide::Sup) {
    const bool hit = pl.kind == LimitKind::Finite && pr.kind == LimitKind::Divergent;
    out = make(Boundary::Right, hit ? Verdict::SupBoundedAS : Verdict::Inconclusive, "sup-via-scale", k);
  } else {
    const bool hit = pl.kind == LimitKind::Divergent && pr.kind == LimitKind::Finite;
    out = make(Boundary::Left, hit ? Verdict::InfBoundedAS : Verdict::Inconclusive, "inf-via-scale", k);
  }
  const double cap = ctx.options().limit.cap;
  add_limit_evidence(out, "|p(l+)|", pl, cap);
  add_limit_evidence(out, "p(r-)", pr, cap);
  out.evidence.push_back({"shift", shift, 0.0});
  guard_hypotheses(out, k);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

BoundaryVerdict arith(Boundary b, Verdict v, const std::string& theorem, const KernelScalars& k,
                      std::vector<Evidence> ev) {
  BoundaryVerdict out = make(b, v, theorem, k);
  out.evidence = std::move(ev);
  return out;
}

std::vector<BoundaryVerdict> cir_verdicts(const CIRParams& p, double x0, const KernelScalars& k) {
  std::vector<BoundaryVerdict> out;
  const double lhs = 2.0 * p.kappa * p.theta;
  const double rhs = k.k0 * p.sigma * p.sigma;
  const bool feller = lhs >= rhs;
  if (k.kp0 == 0.0) {
    out.push_back(arith(Boundary::Left, feller ? Verdict::NoExitAS : Verdict::ExitsWithPositiveProb,
                        "cir-constant-kernel-iff", k, {{"2*kappa*theta", lhs, rhs}}));
    if (!feller) {
      out.push_back(arith(Boundary::Right, Verdict::SupBoundedAS, "cir-constant-kernel-sup", k,
                          {{"2*kappa*theta", lhs, rhs}}));
    }
    return out;
  }
  if (feller) {
    out.push_back(arith(Boundary::Left, Verdict::NoExitAS, "cir-sufficient", k,
                        {{"2*kappa*theta", lhs, rhs}}));
  }
  const double thr = k.k0 * k.k0 / (2.0 * std::abs(k.kp0)) * (rhs - lhs);
  const bool nec = x0 >= thr;
  out.push_back(arith(Boundary::Left, nec ? Verdict::NecessaryHolds : Verdict::ExitsWithPositiveProb,
                      "cir-necessary", k, {{"x0", x0, thr}}));
  if (!feller && nec) {
    out.push_back(arith(Boundary::Left, Verdict::Inconclusive, "cir-gap", k,
                        {{"2*kappa*theta", lhs, rhs}, {"x0", x0, thr}}));
  }
  return out;
}

std::vector<BoundaryVerdict> jacobi_verdicts(const JacobiParams& p, double x0, const KernelScalars& k) {
  std::vector<BoundaryVerdict> out;
  const double w = p.b - p.a;
  const double rhs = k.k0 * p.sigma * p.sigma * w;
  const double left_lhs = 2.0 * p.kappa * (p.theta - p.a);
  const double right_lhs = 2.0 * p.kappa * (p.b - p.theta);
  const bool left_ok = left_lhs >= rhs;
  const bool right_ok = right_lhs >= rhs;
  if (k.kp0 == 0.0) {
    out.push_back(arith(Boundary::Left, left_ok ? Verdict::NoExitAS : Verdict::ExitsWithPositiveProb,
                        "jacobi-constant-kernel-iff", k, {{"2*kappa*(theta-a)", left_lhs, rhs}}));
    out.push_back(arith(Boundary::Right, right_ok ? Verdict::NoExitAS : Verdict::ExitsWithPositiveProb,
                        "jacobi-constant-kernel-iff", k, {{"2*kappa*(b-theta)", right_lhs, rhs}}));
    if (left_ok && right_ok) {
      out.push_back(arith(Boundary::Both, Verdict::NoExitAS, "jacobi-constant-kernel-iff", k,
                          {{"2*kappa*min(theta-a,b-theta)", std::min(left_lhs, right_lhs), rhs}}));
    }
  } else {
    const double scale = k.k0 * k.k0 / (2.0 * std::abs(k.kp0));
    const double thr_l = p.a + scale * (rhs - left_lhs);
    const double thr_r = p.b - scale * (rhs - right_lhs);
    const bool nec_l = x0 >= thr_l;
    const bool nec_r = x0 <= thr_r;
    out.push_back(arith(Boundary::Left, nec_l ? Verdict::NecessaryHolds : Verdict::ExitsWithPositiveProb,
                        "jacobi-necessary", k, {{"x0", x0, thr_l}}));
    out.push_back(arith(Boundary::Right, nec_r ? Verdict::NecessaryHolds : Verdict::ExitsWithPositiveProb,
                        "jacobi-necessary", k, {{"x0", x0, thr_r}}));
    if (left_ok) {
      out.push_back(arith(Boundary::Left, Verdict::NoExitAS, "jacobi-sufficient", k,
                          {{"2*kappa*(theta-a)", left_lhs, rhs}}));
    } else if (nec_l) {
      out.push_back(arith(Boundary::Left, Verdict::Inconclusive, "jacobi-gap", k,
                          {{"2*kappa*(theta-a)", left_lhs, rhs}, {"x0", x0, thr_l}}));
    }
    if (right_ok) {
      out.push_back(arith(Boundary::Right, Verdict::NoExitAS, "jacobi-sufficient", k,
                          {{"2*kappa*(b-theta)", right_lhs, rhs}}));
    } else if (nec_r) {
      out.push_back(arith(Boundary::Right, Verdict::Inconclusive, "jacobi-gap", k,
                          {{"2*kappa*(b-theta)", right_lhs, rhs}, {"x0", x0, thr_r}}));
    }
    if (left_ok && right_ok) {
      out.push_back(arith(Boundary::Both, Verdict::NoExitAS, "jacobi-sufficient", k,
                          {{"2*kappa*min(theta-a,b-theta)", std::min(left_lhs, right_lhs), rhs}}));
    }
  }
  // One-sided boundedness through the scale function.
  const double reduced = (k.k0 * p.sigma * p.sigma - 2.0 * std::abs(k.kp0) / (k.k0 * k.k0)) * w;
  if (right_ok && left_lhs < reduced) {
    out.push_back(arith(Boundary::Right, Verdict::SupBoundedAS, "jacobi-sup-bounded", k,
                        {{"2*kappa*(b-theta)", right_lhs, rhs}, {"2*kappa*(theta-a)", left_lhs, reduced}}));
  }
  if (left_ok && right_lhs < reduced) {
    out.push_back(arith(Boundary::Left, Verdict::InfBoundedAS, "jacobi-inf-bounded", k,
                        {{"2*kappa*(theta-a)", left_lhs, rhs}, {"2*kappa*(b-theta)", right_lhs, reduced}}));
  }
  return out;
}

std::vector<BoundaryVerdict> power_verdicts(const PowerParams& p, const KernelScalars& k) {
  std::vector<BoundaryVerdict> out;
  out.push_back(arith(Boundary::Left, Verdict::NoExitAS, "power-no-blowup-left", k,
                      {{"alpha", p.alpha, 1.0}}));
  const bool explode = p.alpha > 1.0 + p.delta;
  out.push_back(arith(Boundary::Right, explode ? Verdict::ExitsWithPositiveProb : Verdict::Inconclusive,
                      "power-blowup-right", k, {{"alpha", p.alpha, 1.0 + p.delta}}));
  return out;
}

}  // namespace

std::vector<BoundaryVerdict> family_test(const ModelSpec& model, const KernelScalars& kernel) {
  std::vector<BoundaryVerdict> out;
  const auto& f = model.family();
  if (auto* p = std::get_if<CIRParams>(&f)) {
    out = cir_verdicts(*p, model.x0(), kernel);
  } else if (auto* p = std::get_if<JacobiParams>(&f)) {
    out = jacobi_verdicts(*p, model.x0(), kernel);
  } else if (auto* p = std::get_if<PowerParams>(&f)) {
    out = power_verdicts(*p, kernel);
  } else {
    throw PreconditionError("family_test applies to the CIR, Jacobi and power families only");
  }
  for (auto& v : out) guard_hypotheses(v, kernel);
  return out;
}

std::vector<BoundaryVerdict> family_test(const ModelSpec& model, const KernelSpec& kernel) {
  return family_test(model, k0_kprime0(kernel));
}

// ---------------------------------------------------------------------------

Regime asymptotic_regime(double alpha, SchemeKind scheme) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha", "alpha must lie in (0, 1)");
  if (scheme == SchemeKind::GeometricBB2) return Regime::Diverging;
  if (alpha < 0.5) return Regime::Diverging;
  if (alpha > 0.5) return Regime::Vanishing;
  return Regime::Bounded;
}

std::vector<StudyRow> fractional_condition_study(double alpha, SchemeKind scheme,
                                                 const CIRParams& model,
                                                 const std::vector<double>& sweep,
                                                 const StudyOptions& options) {
  const Regime regime = asymptotic_regime(alpha, scheme);
  std::vector<StudyRow> rows;
  for (double s : sweep) {
    KernelSpec kernel = KernelSpec::constant(1.0);
    double xi_max = s;
    if (scheme == SchemeKind::Truncation) {
      kernel = truncation_kernel(alpha, s);
    } else {
      const int N = static_cast<int>(s);
      if (N < 1 || static_cast<double>(N) != s) {
        throw ValidationError("sweep", "quadrature sweeps take integer interval counts, got " + fmt(s));
      }
      const auto weight = scheme == SchemeKind::GeometricBB2 ? QuadratureWeight::GeometricBB2
                                                             : QuadratureWeight::FractionalWeight;
      const ApproxScheme sch =
          ApproxScheme::geometric(alpha, options.xi1, options.ratio, N, options.q, weight);
      kernel = gaussian_quadrature_kernel(sch);
      xi_max = std::get<QuadratureScheme>(sch.kind()).nodes.back();
    }
    const KernelScalars ks = k0_kprime0(kernel);
    StudyRow row;
    row.sweep = s;
    row.xi_max = xi_max;
    row.k0 = ks.k0;
    row.kp0 = ks.kp0;
    const double a = std::abs(ks.kp0);
    row.threshold = model.sigma * model.sigma * ks.k0 * ks.k0 * ks.k0 / (2.0 * a) -
                    model.kappa * model.theta * ks.k0 * ks.k0 / a;
    row.gap = 2.0 * model.kappa * model.theta - ks.k0 * model.sigma * model.sigma;
    row.regime = regime;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vfeller
