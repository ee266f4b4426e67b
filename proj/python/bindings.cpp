#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vfeller/errors.hpp"
#include "vfeller/feller.hpp"
#include "vfeller/fracapprox.hpp"
#include "vfeller/resolvent.hpp"
#include "vfeller/scale.hpp"
#include "vfeller/simulate.hpp"

namespace py = pybind11;
using namespace vfeller;

namespace {

py::dict verdict_dict(const BoundaryVerdict& v) {
  py::list ev;
  for (const auto& e : v.evidence) ev.append(py::dict(py::arg("name") = e.name, py::arg("value") = e.value,
                                                      py::arg("threshold") = e.threshold));
  return py::dict(py::arg("boundary") = to_string(v.boundary), py::arg("verdict") = to_string(v.verdict),
                  py::arg("theorem") = v.theorem, py::arg("evidence") = ev,
                  py::arg("assumptions_checked") = v.assumptions_checked);
}

BoundarySide side_of(const std::string& s) {
  if (s == "left") return BoundarySide::Left;
  if (s == "right") return BoundarySide::Right;
  throw py::value_error("side must be 'left' or 'right'");
}

py::dict limit_dict(const LimitClassification& lc) {
  return py::dict(py::arg("kind") = to_string(lc.kind), py::arg("value") = lc.value,
                  py::arg("closed_form") = lc.closed_form, py::arg("reason") = lc.reason);
}

QuadratureWeight weight_of(const std::string& w) {
  if (w == "fractional") return QuadratureWeight::FractionalWeight;
  if (w == "bb2") return QuadratureWeight::GeometricBB2;
  throw py::value_error("weight must be 'fractional' or 'bb2'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Feller-type boundary tests for stochastic Volterra equations";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("constant", &KernelSpec::constant, py::arg("level"))
      .def_static("sum_of_exponentials", &KernelSpec::sum_of_exponentials, py::arg("weights"), py::arg("rates"))
      .def_static("truncated_fractional", &KernelSpec::truncated_fractional, py::arg("alpha"), py::arg("T"))
      .def_property_readonly("kind", &KernelSpec::kind_name)
      .def("__call__", [](const KernelSpec& k, double t) { return eval(k, t); }, py::arg("t"))
      .def("derivative", [](const KernelSpec& k, double t) { return eval_derivative(k, t); }, py::arg("t"))
      .def("k0_kprime0", [](const KernelSpec& k) {
        const auto s = k0_kprime0(k);
        return py::make_tuple(s.k0, s.kp0);
      })
      .def("__eq__", [](const KernelSpec& a, const KernelSpec& b) { return a == b; })
      .def("__repr__", [](const KernelSpec& k) { return "<KernelSpec " + k.kind_name() + ">"; });

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_static("cir", &ModelSpec::cir, py::arg("kappa"), py::arg("theta"), py::arg("sigma"), py::arg("x0"))
      .def_static("jacobi", &ModelSpec::jacobi, py::arg("a"), py::arg("b"), py::arg("kappa"), py::arg("theta"),
                  py::arg("sigma"), py::arg("x0"))
      .def_static("power", &ModelSpec::power, py::arg("alpha"), py::arg("delta"), py::arg("sigma"), py::arg("x0"))
      .def_static("custom", &ModelSpec::custom, py::arg("drift"), py::arg("diffusion"), py::arg("l"), py::arg("r"),
                  py::arg("x0"))
      .def_property_readonly("family", &ModelSpec::family_name)
      .def_property_readonly("l", &ModelSpec::l)
      .def_property_readonly("r", &ModelSpec::r)
      .def_property_readonly("x0", &ModelSpec::x0)
      .def("drift", &ModelSpec::drift)
      .def("diffusion", &ModelSpec::diffusion)
      .def("__repr__", [](const ModelSpec& s) { return "<ModelSpec " + s.family_name() + ">"; });

  py::class_<ScaleContext>(m, "ScaleContext")
      .def(py::init([](const ModelSpec& model, const KernelSpec& kernel, double c, double beta, double gamma,
                       double quad_tol, bool closed_form) {
             ScaleOptions o;
             o.quad_tol = quad_tol;
             o.closed_form = closed_form;
             o.limit.closed_form = closed_form;
             return ScaleContext(model, kernel, c, beta, gamma, o);
           }),
           py::arg("model"), py::arg("kernel"), py::arg("c"), py::arg("beta") = 0.0, py::arg("gamma") = 0.0,
           py::arg("quad_tol") = 1e-10, py::arg("closed_form") = true)
      .def_property_readonly("c", &ScaleContext::c)
      .def_property_readonly("beta", &ScaleContext::beta)
      .def_property_readonly("gamma", &ScaleContext::gamma)
      .def("with_shifts", &ScaleContext::with_shifts, py::arg("beta"), py::arg("gamma"))
      .def("with_base", &ScaleContext::with_base, py::arg("c"));

  m.def("scale_derivative", &scale_derivative, py::arg("ctx"), py::arg("x"));
  m.def("scale", &scale, py::arg("ctx"), py::arg("x"));
  m.def("v", &v, py::arg("ctx"), py::arg("x"));
  m.def("u_series", &u_series, py::arg("ctx"), py::arg("x"), py::arg("n_terms"));
  m.def(
      "boundary_limit",
      [](const ScaleContext& ctx, const std::string& side, const std::string& target) {
        if (target != "p" && target != "v") throw py::value_error("target must be 'p' or 'v'");
        return limit_dict(boundary_limit(ctx, side_of(side), target == "p" ? LimitTarget::ScaleP : LimitTarget::TestV));
      },
      py::arg("ctx"), py::arg("side"), py::arg("target"));

  m.def("default_eps_shift", &default_eps_shift, py::arg("model"));
  m.def(
      "necessary_test", [](const ScaleContext& c, double eps) { return verdict_dict(necessary_test(c, eps)); },
      py::arg("ctx"), py::arg("eps_shift"));
  m.def(
      "sufficient_test", [](const ScaleContext& c, int n) { return verdict_dict(sufficient_test(c, n)); },
      py::arg("ctx"), py::arg("n_stages") = 8);
  m.def(
      "bounded_interval_test", [](const ScaleContext& c) { return verdict_dict(bounded_interval_test(c)); },
      py::arg("ctx"));
  m.def(
      "sup_inf_test",
      [](const ScaleContext& c, const std::string& side) {
        if (side != "sup" && side != "inf") throw py::value_error("side must be 'sup' or 'inf'");
        return verdict_dict(sup_inf_test(c, side == "sup" ? SupInfSide::Sup : SupInfSide::Inf));
      },
      py::arg("ctx"), py::arg("side"));
  m.def(
      "family_test",
      [](const ModelSpec& model, const KernelSpec& kernel) {
        py::list out;
        for (const auto& v : family_test(model, kernel)) out.append(verdict_dict(v));
        return out;
      },
      py::arg("model"), py::arg("kernel"));

  m.def(
      "solve_resolvent",
      [](const KernelSpec& k, double dt, double horizon) {
        const auto g = solve_resolvent(k, dt, horizon);
        const auto h = check_hypotheses(g);
        return py::dict(py::arg("atom") = g.atom, py::arg("residual") = g.residual, py::arg("t") = g.t,
                        py::arg("density") = g.density, py::arg("kprime_conv_L") = g.kprime_conv_L,
                        py::arg("hypotheses_hold") = h.all());
      },
      py::arg("kernel"), py::arg("dt"), py::arg("horizon"));

  m.def(
      "fractional_gauss_rule",
      [](double alpha, double lo, double hi, int q) {
        const auto r = fractional_gauss_rule(alpha, lo, hi, q);
        return py::make_tuple(r.weights, r.nodes);
      },
      py::arg("alpha"), py::arg("lo"), py::arg("hi"), py::arg("q"));
  m.def("truncation_kernel", &truncation_kernel, py::arg("alpha"), py::arg("T"));
  m.def(
      "geometric_kernel",
      [](double alpha, double xi1, double ratio, int N, int q, const std::string& weight) {
        return build_kernel(ApproxScheme::geometric(alpha, xi1, ratio, N, q, weight_of(weight)));
      },
      py::arg("alpha"), py::arg("xi1") = 1.0, py::arg("ratio") = 6.4, py::arg("N") = 4, py::arg("q") = 1,
      py::arg("weight") = "fractional");
  m.def(
      "quadrature_kernel",
      [](double alpha, std::vector<double> nodes, int q, const std::string& weight) {
        return build_kernel(ApproxScheme::quadrature(alpha, std::move(nodes), q, weight_of(weight)));
      },
      py::arg("alpha"), py::arg("nodes"), py::arg("q") = 1, py::arg("weight") = "fractional");
  m.def(
      "fractional_condition_study",
      [](double alpha, const std::string& scheme, double kappa, double theta, double sigma,
         const std::vector<double>& sweep) {
        SchemeKind k = scheme == "truncation"      ? SchemeKind::Truncation
                       : scheme == "geometric-bb2" ? SchemeKind::GeometricBB2
                       : scheme == "fractional-weight"
                           ? SchemeKind::FractionalWeight
                           : throw py::value_error("unknown scheme " + scheme);
        py::list out;
        for (const auto& r : fractional_condition_study(alpha, k, CIRParams{kappa, theta, sigma}, sweep)) {
          out.append(py::dict(py::arg("sweep") = r.sweep, py::arg("xi_max") = r.xi_max, py::arg("k0") = r.k0,
                              py::arg("kp0") = r.kp0, py::arg("threshold") = r.threshold, py::arg("gap") = r.gap,
                              py::arg("regime") = to_string(r.regime)));
        }
        return out;
      },
      py::arg("alpha"), py::arg("scheme"), py::arg("kappa"), py::arg("theta"), py::arg("sigma"), py::arg("sweep"));

  m.def(
      "simulate",
      [](const ModelSpec& model, const KernelSpec& kernel, double horizon, double dt, int n_paths,
         std::uint64_t seed, const std::string& scheme, double hit_eps, double blowup_cap) {
        SimConfig c;
        c.model = model;
        c.kernel = kernel;
        c.horizon = horizon;
        c.dt = dt;
        c.n_paths = n_paths;
        c.seed = seed;
        if (scheme == "markovian-lift") c.scheme = SimScheme::MarkovianLift;
        else if (scheme != "convolution-euler") throw py::value_error("unknown scheme " + scheme);
        c.hit_eps = hit_eps;
        c.blowup_cap = blowup_cap;
        // Python callables must stay on the calling thread.
        if (model.is_custom()) c.threads = 1;
        const auto r = simulate(c);
        auto q = [](const std::optional<HitQuantiles>& h) -> py::object {
          if (!h) return py::none();
          return py::make_tuple(h->p10, h->p50, h->p90);
        };
        return py::dict(py::arg("hit_fraction_left") = r.hit_fraction_left,
                        py::arg("hit_fraction_right") = r.hit_fraction_right,
                        py::arg("quantiles_left") = q(r.quantiles_left), py::arg("quantiles_right") = q(r.quantiles_right),
                        py::arg("mean_terminal") = r.mean_terminal, py::arg("var_terminal") = r.var_terminal,
                        py::arg("n_surviving") = r.n_surviving, py::arg("n_steps") = r.n_steps,
                        py::arg("seed") = r.seed, py::arg("scheme") = to_string(r.scheme));
      },
      py::arg("model"), py::arg("kernel"), py::arg("horizon"), py::arg("dt"), py::arg("n_paths"), py::arg("seed") = 0,
      py::arg("scheme") = "convolution-euler", py::arg("hit_eps") = 0.0, py::arg("blowup_cap") = 0.0);
}
