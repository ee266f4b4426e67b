#include "vfeller/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "vfeller/config.hpp"
#include "vfeller/errors.hpp"
#include "vfeller/feller.hpp"
#include "vfeller/fracapprox.hpp"
#include "vfeller/resolvent.hpp"
#include "vfeller/scale.hpp"
#include "vfeller/simulate.hpp"

namespace vfeller::cli {

namespace {

using json = nlohmann::ordered_json;
using config::Experiment;
using config::format_number;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUndecided = 2;

json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

class Csv {
 public:
  explicit Csv(const config::Ini& cfg) {
    for (const auto& [section, body] : cfg)
      for (const auto& [k, v] : body) s_ << "# " << section << '.' << k << '=' << v << '\n';
  }
  void comment(const std::string& c) { s_ << "# " << c << '\n'; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s_ << (i ? "," : "") << csv_field(cells[i]);
    s_ << '\n';
  }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

json config_json(const config::Ini& ini) {
  json j = json::object();
  for (const auto& [section, body] : ini)
    for (const auto& [k, v] : body) j[section][k] = v;
  return j;
}

json verdict_json(const std::string& test, const BoundaryVerdict& v) {
  json ev = json::array();
  for (const auto& e : v.evidence) ev.push_back({{"name", e.name}, {"value", num(e.value)}, {"threshold", num(e.threshold)}});
  return {{"test", test},
          {"boundary", to_string(v.boundary)},
          {"verdict", to_string(v.verdict)},
          {"theorem", v.theorem},
          {"evidence", ev},
          {"assumptions_checked", v.assumptions_checked}};
}

std::string evidence_text(const BoundaryVerdict& v) {
  std::string s;
  for (const auto& e : v.evidence) {
    s += (s.empty() ? "" : ";") + e.name + "=" + format_number(e.value) + "/" + format_number(e.threshold);
  }
  return s;
}

using TaggedVerdicts = std::vector<std::pair<std::string, BoundaryVerdict>>;

TaggedVerdicts run_tests(const Experiment& e) {
  const ScaleContext ctx(e.model, e.kernel, e.test.c, 0.0, 0.0, e.test.options);
  TaggedVerdicts out;
  for (const auto& t : e.test.tests) {
    if (t == "family") {
      for (auto& v : family_test(e.model, e.kernel)) out.emplace_back(t, std::move(v));
    } else if (t == "necessary") {
      out.emplace_back(t, necessary_test(ctx, e.test.eps_shift));
    } else if (t == "sufficient") {
      out.emplace_back(t, sufficient_test(ctx, e.test.n_stages));
    } else if (t == "bounded") {
      out.emplace_back(t, bounded_interval_test(ctx));
    } else if (t == "sup") {
      out.emplace_back(t, sup_inf_test(ctx, SupInfSide::Sup));
    } else {
      out.emplace_back(t, sup_inf_test(ctx, SupInfSide::Inf));
    }
  }
  return out;
}

bool all_decisive(const TaggedVerdicts& vs) {
  for (const auto& [t, v] : vs)
    if (!is_decisive(v.verdict)) return false;
  return true;
}

struct Output {
  std::string text;
  int code = kOk;
};

Output cmd_test(const Experiment& e) {
  const auto vs = run_tests(e);
  Output o;
  o.code = all_decisive(vs) ? kOk : kUndecided;
  if (e.output.format == "csv") {
    Csv csv(e.resolved);
    csv.row({"test", "boundary", "verdict", "theorem", "evidence"});
    for (const auto& [t, v] : vs) csv.row({t, to_string(v.boundary), to_string(v.verdict), v.theorem, evidence_text(v)});
    o.text = csv.str();
  } else {
    json j{{"command", "test"}, {"config", config_json(e.resolved)}, {"verdicts", json::array()}};
    for (const auto& [t, v] : vs) j["verdicts"].push_back(verdict_json(t, v));
    j["decisive"] = o.code == kOk;
    o.text = j.dump(2) + "\n";
  }
  return o;
}

Output cmd_scale(const Experiment& e) {
  const ScaleContext ctx(e.model, e.kernel, e.test.c, e.scale.beta, e.scale.gamma, e.test.options);
  struct Row { double x, dp, p, v, u; };
  std::vector<Row> rows;
  for (int i = 0; i < e.scale.points; ++i) {
    const int n = e.scale.points;
    const double x = i == 0 ? e.scale.from
                     : i + 1 == n ? e.scale.to
                                  : e.scale.from + (e.scale.to - e.scale.from) * i / (n - 1);
    rows.push_back({x, scale_derivative(ctx, x), scale(ctx, x), v(ctx, x), u_series(ctx, x, e.scale.terms)});
  }
  Output o;
  if (e.output.format == "csv") {
    Csv csv(e.resolved);
    csv.row({"x", "dp", "p", "v", "u"});
    for (const auto& r : rows) {
      csv.row({format_number(r.x), format_number(r.dp), format_number(r.p), format_number(r.v), format_number(r.u)});
    }
    o.text = csv.str();
    return o;
  }
  json j{{"command", "scale"}, {"config", config_json(e.resolved)}, {"rows", json::array()}};
  for (const auto& r : rows) j["rows"].push_back({{"x", num(r.x)}, {"dp", num(r.dp)}, {"p", num(r.p)}, {"v", num(r.v)}, {"u", num(r.u)}});
  for (auto side : {BoundarySide::Left, BoundarySide::Right}) {
    for (auto target : {LimitTarget::ScaleP, LimitTarget::TestV}) {
      const auto lc = boundary_limit(ctx, side, target);
      j["limits"][to_string(side)][target == LimitTarget::ScaleP ? "p" : "v"] = {
          {"kind", to_string(lc.kind)}, {"value", num(lc.value)}, {"closed_form", lc.closed_form}, {"reason", lc.reason}};
    }
  }
  o.text = j.dump(2) + "\n";
  return o;
}

Output cmd_resolvent(const Experiment& e) {
  const ResolventGrid g = solve_resolvent(e.kernel, e.sim.dt, e.sim.horizon);
  const HypothesisReport h = check_hypotheses(g);
  Output o;
  if (e.output.format == "csv") {
    Csv csv(e.resolved);
    csv.comment("atom=" + format_number(g.atom) + " residual=" + format_number(g.residual) +
                " hypotheses=" + (h.all() ? "true" : "false"));
    csv.row({"t", "density", "kprime_conv_L"});
    for (std::size_t i = 0; i < g.t.size(); ++i) {
      csv.row({format_number(g.t[i]), format_number(g.density[i]), format_number(g.kprime_conv_L[i])});
    }
    o.text = csv.str();
    return o;
  }
  json j{{"command", "resolvent"},
         {"config", config_json(e.resolved)},
         {"atom", num(g.atom)},
         {"residual", num(g.residual)},
         {"hypotheses",
          {{"tol", num(h.tol)},
           {"density_nonnegative", h.density_nonnegative},
           {"worst_density", {{"index", h.worst_density_index}, {"value", num(h.worst_density)}}},
           {"kprime_nonpositive", h.kprime_nonpositive},
           {"worst_positive", {{"index", h.worst_positive_index}, {"value", num(h.worst_positive)}}},
           {"kprime_nondecreasing", h.kprime_nondecreasing},
           {"worst_decrease", {{"index", h.worst_decrease_index}, {"value", num(h.worst_decrease)}}}}},
         {"t", g.t},
         {"density", g.density},
         {"kprime_conv_L", g.kprime_conv_L}};
  o.text = j.dump(2) + "\n";
  return o;
}

SchemeKind study_kind(const std::string& s) {
  if (s == "truncation") return SchemeKind::Truncation;
  return s == "geometric-bb2" ? SchemeKind::GeometricBB2 : SchemeKind::FractionalWeight;
}

Output cmd_approx(const Experiment& e) {
  const ApproxScheme scheme = config::approx_scheme(e.approx);
  const KernelSpec k = build_kernel(scheme);
  const KernelScalars ks = k0_kprime0(k);
  const KernelScalars an = analytic_scalars(scheme);
  const auto* se = std::get_if<SumOfExponentials>(&k.variant());
  std::vector<StudyRow> study;
  if (e.approx.study != "none") {
    const auto& cir = std::get<CIRParams>(e.model.family());
    StudyOptions so;
    so.xi1 = e.approx.xi1;
    so.ratio = e.approx.ratio;
    so.q = e.approx.q;
    study = fractional_condition_study(e.approx.alpha, study_kind(e.approx.study), cir, e.approx.sweep, so);
  }
  Output o;
  if (e.output.format == "csv") {
    Csv csv(e.resolved);
    csv.comment("k0=" + format_number(ks.k0) + " kp0=" + format_number(ks.kp0));
    if (!study.empty()) {
      csv.row({"sweep", "xi_max", "k0", "kp0", "threshold", "gap", "regime"});
      for (const auto& r : study) {
        csv.row({format_number(r.sweep), format_number(r.xi_max), format_number(r.k0), format_number(r.kp0),
                 format_number(r.threshold), format_number(r.gap), to_string(r.regime)});
      }
    } else {
      csv.row({"n", "m", "x"});
      if (se) {
        for (std::size_t n = 0; n < se->weights.size(); ++n) {
          csv.row({std::to_string(n + 1), format_number(se->weights[n]), format_number(se->rates[n])});
        }
      }
    }
    o.text = csv.str();
    return o;
  }
  json j{{"command", "approx"},
         {"config", config_json(e.resolved)},
         {"kernel", k.kind_name()},
         {"k0", num(ks.k0)},
         {"kp0", num(ks.kp0)},
         {"analytic", {{"k0", num(an.k0)}, {"kp0", num(an.kp0)}}},
         {"pairs", json::array()}};
  if (se) {
    for (std::size_t n = 0; n < se->weights.size(); ++n) j["pairs"].push_back({{"m", se->weights[n]}, {"x", se->rates[n]}});
  }
  j["error_table"] = json::array();
  for (const auto& r : approximation_error(scheme, e.approx.t_grid)) {
    j["error_table"].push_back({{"t", num(r.t)}, {"approx", num(r.approx)}, {"exact", num(r.exact)},
                                {"abs_error", num(r.abs_error)}, {"rel_error", num(r.rel_error)}});
  }
  if (!study.empty()) {
    j["study"] = json::array();
    for (const auto& r : study) {
      j["study"].push_back({{"sweep", num(r.sweep)}, {"xi_max", num(r.xi_max)}, {"k0", num(r.k0)}, {"kp0", num(r.kp0)},
                            {"threshold", num(r.threshold)}, {"gap", num(r.gap)}, {"regime", to_string(r.regime)}});
    }
  }
  o.text = j.dump(2) + "\n";
  return o;
}

const char* hit_name(HitSide h) {
  return h == HitSide::Left ? "left" : h == HitSide::Right ? "right" : "none";
}

json report_json(const SimulationReport& r) {
  auto q = [](const std::optional<HitQuantiles>& h) -> json {
    if (!h) return nullptr;
    return {{"p10", num(h->p10)}, {"p50", num(h->p50)}, {"p90", num(h->p90)}};
  };
  return {{"hit_fraction_left", num(r.hit_fraction_left)},
          {"hit_fraction_right", num(r.hit_fraction_right)},
          {"first_hit_time_quantiles", {{"left", q(r.quantiles_left)}, {"right", q(r.quantiles_right)}}},
          {"mean_terminal", num(r.mean_terminal)},
          {"var_terminal", num(r.var_terminal)},
          {"n_surviving", r.n_surviving},
          {"scheme", to_string(r.scheme)},
          {"dt", num(r.dt)},
          {"n_steps", r.n_steps},
          {"n_paths", r.n_paths},
          {"seed", r.seed},
          {"hit_eps", num(r.hit_eps)},
          {"blowup_cap", num(r.blowup_cap)}};
}

void write_paths_csv(const Experiment& e, const SimulationReport& r) {
  if (e.output.paths_csv.empty()) return;
  std::ofstream f(e.output.paths_csv, std::ios::binary);
  if (!f) throw config::ConfigError("output.paths_csv", "cannot write " + e.output.paths_csv);
  f << "path,hit,hit_time,terminal\n";
  for (std::size_t p = 0; p < r.paths.size(); ++p) {
    const auto& o = r.paths[p];
    f << p << ',' << hit_name(o.hit) << ',' << (o.hit == HitSide::None ? "" : format_number(o.hit_time)) << ','
      << format_number(o.terminal) << '\n';
  }
}

Output cmd_simulate(const Experiment& e) {
  const SimulationReport r = simulate(e.sim);
  write_paths_csv(e, r);
  Output o;
  if (e.output.format == "csv") {
    Csv csv(e.resolved);
    csv.row({"scheme", "dt", "n_steps", "n_paths", "seed", "hit_fraction_left", "hit_fraction_right", "mean_terminal",
             "var_terminal", "n_surviving"});
    csv.row({to_string(r.scheme), format_number(r.dt), std::to_string(r.n_steps), std::to_string(r.n_paths),
             std::to_string(r.seed), format_number(r.hit_fraction_left), format_number(r.hit_fraction_right),
             format_number(r.mean_terminal), format_number(r.var_terminal), std::to_string(r.n_surviving)});
    o.text = csv.str();
    return o;
  }
  json j{{"command", "simulate"}, {"config", config_json(e.resolved)}, {"report", report_json(r)}};
  o.text = j.dump(2) + "\n";
  return o;
}

Output cmd_crosscheck(const Experiment& e) {
  const auto tagged = run_tests(e);
  std::vector<BoundaryVerdict> vs;
  for (const auto& [t, v] : tagged) vs.push_back(v);
  const CrosscheckReport cr = verdict_crosscheck(e.model, e.kernel, e.sim, vs, e.tolerances);
  write_paths_csv(e, cr.simulation);
  Output o;
  o.code = all_decisive(tagged) && cr.all_consistent() ? kOk : kUndecided;
  if (e.output.format == "csv") {
    Csv csv(e.resolved);
    csv.row({"test", "boundary", "verdict", "theorem", "rule", "required", "observed", "status"});
    for (std::size_t i = 0; i < cr.entries.size(); ++i) {
      const auto& en = cr.entries[i];
      csv.row({tagged[i].first, to_string(en.verdict.boundary), to_string(en.verdict.verdict), en.verdict.theorem, en.rule,
               format_number(en.required), format_number(en.observed), en.consistent ? "CONSISTENT" : "INCONSISTENT"});
    }
    o.text = csv.str();
    return o;
  }
  json j{{"command", "crosscheck"}, {"config", config_json(e.resolved)}, {"entries", json::array()}};
  for (std::size_t i = 0; i < cr.entries.size(); ++i) {
    const auto& en = cr.entries[i];
    json v = verdict_json(tagged[i].first, en.verdict);
    v["rule"] = en.rule;
    v["required"] = num(en.required);
    v["observed"] = num(en.observed);
    v["status"] = en.consistent ? "CONSISTENT" : "INCONSISTENT";
    j["entries"].push_back(v);
  }
  j["simulation"] = report_json(cr.simulation);
  j["all_consistent"] = cr.all_consistent();
  o.text = j.dump(2) + "\n";
  return o;
}

struct Flag {
  std::string name;
  std::string key;
  std::string help;
  std::string value;
  CLI::Option* opt = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  Output (*fn)(const Experiment&) = nullptr;
  std::string config_path;
  std::vector<std::string> sets;
  bool dump = false;
  std::vector<Flag> flags;
};

void add_common(Command& c) {
  c.app->add_option("-c,--config", c.config_path, "INI config file")->check(CLI::ExistingFile);
  c.app->add_option("--set", c.sets, "Override a config entry, section.key=value (repeatable)");
  c.app->add_flag("--dump-config", c.dump, "Print the fully resolved config and exit");
}

void add_flags(Command& c, std::vector<Flag> flags) {
  c.flags = std::move(flags);
  for (auto& f : c.flags) f.opt = c.app->add_option(f.name, f.value, f.help + " (" + f.key + ")");
}

std::vector<Flag> output_flags() {
  return {{"--format", "output.format", "Output format json|csv", {}},
          {"--output", "output.path", "Write output to a file instead of stdout", {}}};
}

std::vector<Flag> test_flags() {
  return {{"--tests", "test.tests", "Comma list of family,necessary,sufficient,bounded,sup,inf", {}},
          {"--base", "test.c", "Base point c", {}},
          {"--eps-shift", "test.eps_shift", "Shift margin of the necessary test", {}},
          {"--n-stages", "test.n_stages", "Sequence length of the sufficient test", {}}};
}

std::vector<Flag> sim_flags() {
  return {{"--horizon", "sim.horizon", "Time horizon", {}},
          {"--dt", "sim.dt", "Time step", {}},
          {"--n-paths", "sim.n_paths", "Number of paths", {}},
          {"--seed", "sim.seed", "64-bit seed", {}},
          {"--scheme", "sim.scheme", "convolution-euler|markovian-lift", {}},
          {"--hit-eps", "sim.hit_eps", "Finite-boundary proximity threshold", {}},
          {"--blowup-cap", "sim.blowup_cap", "Infinite-boundary threshold", {}},
          {"--paths-csv", "output.paths_csv", "Per-path first-hit CSV file", {}}};
}

template <class... V>
std::vector<Flag> concat(V... parts) {
  std::vector<Flag> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

void write_output(const Experiment& e, const std::string& text, std::ostream& out) {
  if (e.output.path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(e.output.path, std::ios::binary);
  if (!f) throw config::ConfigError("output.path", "cannot write " + e.output.path);
  f << text;
}

int execute(Command& c, std::ostream& out) {
  config::Ini raw;
  config::SourceLines lines;
  if (!c.config_path.empty()) raw = config::read_ini_file(c.config_path, &lines);
  for (const auto& s : c.sets) config::apply_assignment(raw, s);
  for (const auto& f : c.flags) {
    if (f.opt->count() > 0) config::apply_assignment(raw, f.key + "=" + f.value);
  }
  const Experiment e = config::resolve(raw, lines);
  if (c.dump) {
    out << config::write_ini(e.resolved);
    return kOk;
  }
  const Output o = c.fn(e);
  write_output(e, o.text, out);
  return o.code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feller-type boundary tests for stochastic Volterra equations", "vfeller"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vfeller 0.1.0");

  std::vector<Command> cmds(6);
  const std::vector<std::tuple<const char*, const char*, Output (*)(const Experiment&)>> table{
      {"test", "Run boundary tests and print verdicts", cmd_test},
      {"scale", "Tabulate p, v and the u series on a grid", cmd_scale},
      {"resolvent", "Solve for the resolvent of the first kind and check the kernel hypotheses", cmd_resolvent},
      {"approx", "Build a nonsingular approximation of the fractional kernel", cmd_approx},
      {"simulate", "Monte Carlo simulation with boundary-hitting statistics", cmd_simulate},
      {"crosscheck", "Run the tests, simulate, and compare verdicts with hit fractions", cmd_crosscheck}};
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& [name, desc, fn] = table[i];
    cmds[i].app = app.add_subcommand(name, desc);
    cmds[i].fn = fn;
    add_common(cmds[i]);
  }
  add_flags(cmds[0], concat(test_flags(), output_flags()));
  add_flags(cmds[1], concat(std::vector<Flag>{{"--from", "scale.from", "Grid start", {}},
                                              {"--to", "scale.to", "Grid end", {}},
                                              {"--points", "scale.points", "Number of grid points", {}},
                                              {"--base", "test.c", "Base point c", {}},
                                              {"--beta", "scale.beta", "Shift left of c", {}},
                                              {"--gamma", "scale.gamma", "Shift right of c", {}},
                                              {"--terms", "scale.terms", "Terms of the u series", {}}},
                            output_flags()));
  add_flags(cmds[2], concat(std::vector<Flag>{{"--dt", "sim.dt", "Grid step", {}},
                                              {"--horizon", "sim.horizon", "Grid length", {}}},
                            output_flags()));
  add_flags(cmds[3], concat(std::vector<Flag>{{"--alpha", "approx.alpha", "Fractional exponent in (0, 1)", {}},
                                              {"--scheme", "approx.scheme", "truncation|fractional-weight|geometric-bb2", {}},
                                              {"--T", "approx.T", "Truncation level", {}},
                                              {"--nodes", "approx.nodes", "Explicit comma list of nodes", {}},
                                              {"--xi1", "approx.xi1", "First geometric node", {}},
                                              {"--ratio", "approx.ratio", "Geometric ratio", {}},
                                              {"--N", "approx.N", "Number of intervals", {}},
                                              {"--q", "approx.q", "Gauss order per interval", {}},
                                              {"--study", "approx.study", "none|truncation|fractional-weight|geometric-bb2", {}},
                                              {"--sweep", "approx.sweep", "Study sweep values", {}}},
                            output_flags()));
  add_flags(cmds[4], concat(sim_flags(), output_flags()));
  add_flags(cmds[5], concat(test_flags(), sim_flags(),
                            std::vector<Flag>{{"--leak-tol", "sim.leak_tol", "Allowed hit fraction under NoExitAS", {}},
                                              {"--floor-tol", "sim.floor_tol", "Required hit fraction under Exits", {}}},
                            output_flags()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }
  for (auto& c : cmds) {
    if (!c.app->parsed()) continue;
    try {
      return execute(c, out);
    } catch (const config::ConfigError& e) {
      err << "error: config " << e.key();
      if (e.line()) err << " (line " << *e.line() << ")";
      err << ": " << e.what() << '\n';
    } catch (const ValidationError& e) {
      err << "error: " << e.key() << ": " << e.what() << '\n';
    } catch (const NumericError& e) {
      err << "error: " << c.app->get_name() << ": numeric: " << e.what() << '\n';
    } catch (const std::exception& e) {
      err << "error: " << c.app->get_name() << ": " << e.what() << '\n';
    }
    return kError;
  }
  return kError;
}

}  // namespace vfeller::cli
