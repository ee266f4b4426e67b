#include "vfeller/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vfeller/errors.hpp"
#include "vfeller/feller.hpp"

namespace vfeller::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

SourceLines scan_lines(const std::string& text) {
  SourceLines lines;
  std::istringstream in(text);
  std::string line, section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) lines.emplace(section + "." + trim(t.substr(0, eq)), n);
  }
  return lines;
}

Ini from_ptree(const boost::property_tree::ptree& pt, const SourceLines& lines) {
  Ini ini;
  for (const auto& [section, body] : pt) {
    if (body.empty()) {
      auto it = lines.find("." + section);
      throw ConfigError(section, "key outside any [section]",
                        it == lines.end() ? std::nullopt : std::optional<int>(it->second));
    }
    for (const auto& [key, value] : body) ini[section][key] = trim(value.data());
  }
  return ini;
}

Ini parse(std::istream& in, const std::string& text, const std::string& name, SourceLines* lines) {
  const SourceLines found = scan_lines(text);
  if (lines) *lines = found;
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(name, e.message(), static_cast<int>(e.line()));
  }
  return from_ptree(pt, found);
}

class Reader {
 public:
  Reader(const Ini& raw, Ini& out, std::string section, const SourceLines& lines)
      : out_(out[section]), section_(std::move(section)), lines_(lines) {
    auto it = raw.find(section_);
    if (it != raw.end()) in_ = &it->second;
  }

  std::string path(const std::string& key) const { return section_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = lines_.find(path(key));
    throw ConfigError(path(key), what, it == lines_.end() ? std::nullopt : std::optional<int>(it->second));
  }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!in_) return std::nullopt;
    auto it = in_->find(key);
    if (it == in_->end()) return std::nullopt;
    return it->second;
  }

  double real(const std::string& key, std::optional<double> def) {
    auto s = raw(key);
    double v;
    if (!s) {
      if (!def) fail(key, "required key is missing");
      v = *def;
    } else {
      v = parse_real(key, *s);
    }
    out_[key] = format_number(v);
    return v;
  }

  long long integer(const std::string& key, long long def) {
    auto s = raw(key);
    long long v = def;
    if (s) {
      auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
      if (ec != std::errc() || p != s->data() + s->size()) fail(key, "expected an integer, got '" + *s + "'");
    }
    out_[key] = std::to_string(v);
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    auto s = raw(key);
    std::uint64_t v = def;
    if (s) {
      auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
      if (ec != std::errc() || p != s->data() + s->size()) {
        fail(key, "expected a nonnegative 64-bit integer, got '" + *s + "'");
      }
    }
    out_[key] = std::to_string(v);
    return v;
  }

  bool boolean(const std::string& key, bool def) {
    auto s = raw(key);
    bool v = def;
    if (s) {
      if (*s == "true") v = true;
      else if (*s == "false") v = false;
      else fail(key, "expected true or false, got '" + *s + "'");
    }
    out_[key] = v ? "true" : "false";
    return v;
  }

  std::string choice(const std::string& key, const std::string& def, const std::vector<std::string>& allowed) {
    auto s = raw(key);
    const std::string v = s ? *s : def;
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
      fail(key, "expected one of " + list + ", got '" + v + "'");
    }
    out_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def) {
    auto s = raw(key);
    out_[key] = s ? *s : def;
    return out_[key];
  }

  std::vector<double> reals(const std::string& key, std::optional<std::string> def) {
    auto s = raw(key);
    if (!s) {
      if (!def) fail(key, "required key is missing");
      s = def;
    }
    std::vector<double> v;
    std::string canon;
    for (const auto& item : split(*s, ',')) {
      v.push_back(parse_real(key, item));
      canon += (canon.empty() ? "" : ",") + format_number(v.back());
    }
    out_[key] = canon;
    return v;
  }

  std::vector<std::string> words(const std::string& key, const std::string& def,
                                 const std::vector<std::string>& allowed) {
    auto s = raw(key);
    std::vector<std::string> v = split(s ? *s : def, ',');
    std::string canon;
    for (const auto& w : v) {
      if (std::find(allowed.begin(), allowed.end(), w) == allowed.end()) fail(key, "unknown entry '" + w + "'");
      canon += (canon.empty() ? "" : ",") + w;
    }
    out_[key] = canon;
    return v;
  }

  // Any key present but never asked for is an error.
  void finish(const std::string& context = "") {
    if (!in_) return;
    for (const auto& [k, v] : *in_) {
      if (!used_.count(k)) fail(k, "unknown key" + (context.empty() ? "" : " for " + context));
    }
  }

 private:
  double parse_real(const std::string& key, const std::string& s) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
      fail(key, "expected a decimal number, got '" + s + "'");
    }
    return v;
  }

  const std::map<std::string, std::string>* in_ = nullptr;
  std::map<std::string, std::string>& out_;
  std::string section_;
  const SourceLines& lines_;
  std::set<std::string> used_;
};

std::string bare_message(const ValidationError& e) {
  const std::string w = e.what();
  const std::string prefix = e.key() + ": ";
  return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
}

// Module validation errors carry a bare key; qualify it with the section.
template <class F>
auto guarded(Reader& r, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    r.fail(e.key(), bare_message(e));
  }
}

ModelSpec read_model(Reader& r) {
  const std::string fam = r.choice("family", "cir", {"cir", "jacobi", "power"});
  ModelSpec m = [&] {
    if (fam == "cir") {
      const double kappa = r.real("kappa", 1.0), theta = r.real("theta", 1.0), sigma = r.real("sigma", 1.0);
      const double x0 = r.real("x0", 1.0);
      return guarded(r, [&] { return ModelSpec::cir(kappa, theta, sigma, x0); });
    }
    if (fam == "jacobi") {
      const double a = r.real("a", 0.0), b = r.real("b", 1.0);
      const double kappa = r.real("kappa", 1.0), theta = r.real("theta", 0.5 * (a + b));
      const double sigma = r.real("sigma", 1.0), x0 = r.real("x0", 0.5 * (a + b));
      return guarded(r, [&] { return ModelSpec::jacobi(a, b, kappa, theta, sigma, x0); });
    }
    const double alpha = r.real("alpha", 2.0), delta = r.real("delta", 0.0), sigma = r.real("sigma", 1.0);
    const double x0 = r.real("x0", 1.0);
    return guarded(r, [&] { return ModelSpec::power(alpha, delta, sigma, x0); });
  }();
  r.finish("family " + fam);
  return m;
}

KernelSpec read_kernel(Reader& r) {
  const std::string kind = r.choice("kind", "constant", {"constant", "sumexp", "fractional", "geometric"});
  KernelSpec k = [&] {
    if (kind == "constant") {
      const double level = r.real("level", 1.0);
      return guarded(r, [&] { return KernelSpec::constant(level); });
    }
    if (kind == "sumexp") {
      auto w = r.reals("weights", std::nullopt);
      auto x = r.reals("rates", std::nullopt);
      return guarded(r, [&] { return KernelSpec::sum_of_exponentials(w, x); });
    }
    if (kind == "fractional") {
      const double alpha = r.real("alpha", 0.5), T = r.real("T", 100.0);
      return guarded(r, [&] { return KernelSpec::truncated_fractional(alpha, T); });
    }
    const double alpha = r.real("alpha", 0.5), xi1 = r.real("xi1", 1.0), ratio = r.real("ratio", 6.4);
    const long long N = r.integer("N", 4), q = r.integer("q", 1);
    const std::string w = r.choice("weight", "fractional", {"fractional", "bb2"});
    return guarded(r, [&] {
      if (N < 1 || N > 64) throw ValidationError("N", "N must lie in [1, 64]");
      if (q < 1 || q > 12) throw ValidationError("q", "q must lie in [1, 12]");
      return build_kernel(ApproxScheme::geometric(
          alpha, xi1, ratio, static_cast<int>(N), static_cast<int>(q),
          w == "bb2" ? QuadratureWeight::GeometricBB2 : QuadratureWeight::FractionalWeight));
    });
  }();
  r.finish("kernel kind " + kind);
  return k;
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& what, std::optional<int> line)
    : std::runtime_error(what), key_(std::move(key)), line_(line) {}

Ini read_ini_file(const std::string& path, SourceLines* lines) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, "cannot open config file");
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  std::istringstream in(text);
  return parse(in, text, path, lines);
}

Ini read_ini_string(const std::string& text, SourceLines* lines) {
  std::istringstream in(text);
  return parse(in, text, "<string>", lines);
}

std::string write_ini(const Ini& ini) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, body] : ini) {
    if (!first) out << '\n';
    first = false;
    out << '[' << section << "]\n";
    for (const auto& [k, v] : body) out << k << " = " << v << '\n';
  }
  return out.str();
}

void apply_assignment(Ini& ini, const std::string& a) {
  const auto eq = a.find('=');
  const auto dot = a.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError(a, "expected section.key=value");
  }
  const std::string section = trim(a.substr(0, dot));
  const std::string key = trim(a.substr(dot + 1, eq - dot - 1));
  if (section.empty() || key.empty()) throw ConfigError(a, "expected section.key=value");
  ini[section][key] = trim(a.substr(eq + 1));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

ApproxScheme approx_scheme(const ApproxSection& a) {
  if (a.scheme == "truncation") return ApproxScheme::truncation(a.alpha, a.T);
  const auto w = a.scheme == "geometric-bb2" ? QuadratureWeight::GeometricBB2 : QuadratureWeight::FractionalWeight;
  if (!a.nodes.empty()) return ApproxScheme::quadrature(a.alpha, a.nodes, a.q, w);
  return ApproxScheme::geometric(a.alpha, a.xi1, a.ratio, a.N, a.q, w);
}

Experiment resolve(const Ini& raw, const SourceLines& lines) {
  static const std::set<std::string> kSections{"model", "kernel", "test", "scale", "sim", "approx", "output"};
  for (const auto& [section, body] : raw) {
    if (!kSections.count(section)) {
      auto it = body.empty() ? lines.end() : lines.find(section + "." + body.begin()->first);
      throw ConfigError(section, "unknown section [" + section + "]",
                        it == lines.end() ? std::nullopt : std::optional<int>(it->second));
    }
  }
  Experiment e;
  Ini& out = e.resolved;

  Reader rm(raw, out, "model", lines);
  e.model = read_model(rm);
  Reader rk(raw, out, "kernel", lines);
  e.kernel = read_kernel(rk);

  Reader rt(raw, out, "test", lines);
  e.test.tests = rt.words("tests", "family,necessary,sufficient",
                          {"family", "necessary", "sufficient", "bounded", "sup", "inf"});
  e.test.c = rt.real("c", e.model.x0());
  if (!e.model.contains(e.test.c)) rt.fail("c", "base point must lie inside the state interval");
  e.test.eps_shift = rt.real("eps_shift", default_eps_shift(e.model));
  if (!(e.test.eps_shift > 0.0)) rt.fail("eps_shift", "eps_shift must be positive");
  const long long stages = rt.integer("n_stages", 8);
  if (stages < 6 || stages > 60) rt.fail("n_stages", "n_stages must lie in [6, 60]");
  e.test.n_stages = static_cast<int>(stages);
  e.test.options.quad_tol = rt.real("quad_tol", 1e-10);
  if (!(e.test.options.quad_tol > 0.0 && e.test.options.quad_tol < 1e-2)) rt.fail("quad_tol", "quad_tol must lie in (0, 1e-2)");
  e.test.options.limit.cap = rt.real("cap", 1e12);
  if (!(e.test.options.limit.cap > 1.0)) rt.fail("cap", "cap must exceed 1");
  e.test.options.closed_form = rt.boolean("closed_form", true);
  e.test.options.limit.closed_form = e.test.options.closed_form;
  rt.finish();

  Reader rs(raw, out, "scale", lines);
  {
    // Default grid: well inside a bounded interval, a factor 8 around c otherwise.
    const double l = e.model.l(), r = e.model.r(), c = e.test.c;
    double lo = c - 4.0, hi = c + 4.0;
    if (std::isfinite(l) && std::isfinite(r)) {
      lo = l + 0.1 * (r - l);
      hi = r - 0.1 * (r - l);
    } else if (std::isfinite(l)) {
      lo = l + (c - l) / 8.0;
      hi = l + (c - l) * 8.0;
    } else if (std::isfinite(r)) {
      lo = r - (r - c) * 8.0;
      hi = r - (r - c) / 8.0;
    }
    e.scale.from = rs.real("from", lo);
    e.scale.to = rs.real("to", hi);
    if (!e.model.contains(e.scale.from)) rs.fail("from", "grid start lies outside the state interval");
    if (!e.model.contains(e.scale.to)) rs.fail("to", "grid end lies outside the state interval");
    if (!(e.scale.to >= e.scale.from)) rs.fail("to", "need from <= to");
    const long long n = rs.integer("points", 9);
    if (n < 1 || n > 100000) rs.fail("points", "points must lie in [1, 100000]");
    e.scale.points = static_cast<int>(n);
  }
  e.scale.beta = rs.real("beta", 0.0);
  e.scale.gamma = rs.real("gamma", 0.0);
  const long long terms = rs.integer("terms", 8);
  if (terms < 1 || terms > 64) rs.fail("terms", "terms must lie in [1, 64]");
  e.scale.terms = static_cast<int>(terms);
  rs.finish();

  Reader rsim(raw, out, "sim", lines);
  SimConfig& s = e.sim;
  s.model = e.model;
  s.kernel = e.kernel;
  s.horizon = rsim.real("horizon", 1.0);
  s.dt = rsim.real("dt", 1e-3);
  const long long np = rsim.integer("n_paths", 1000);
  if (np < 1 || np > 100000000) rsim.fail("n_paths", "n_paths must be positive");
  s.n_paths = static_cast<int>(np);
  s.seed = rsim.unsigned_integer("seed", 0);
  s.scheme = rsim.choice("scheme", "convolution-euler", {"convolution-euler", "markovian-lift"}) == "markovian-lift"
                 ? SimScheme::MarkovianLift
                 : SimScheme::ConvolutionEuler;
  s.hit_eps = rsim.real("hit_eps", default_hit_eps(e.model));
  if (!(s.hit_eps > 0.0)) rsim.fail("hit_eps", "hit_eps must be positive");
  s.blowup_cap = rsim.real("blowup_cap", default_blowup_cap(e.model));
  e.tolerances.leak_tol = rsim.real("leak_tol", 0.02);
  e.tolerances.floor_tol = rsim.real("floor_tol", 0.05);
  if (!(e.tolerances.leak_tol >= 0.0 && e.tolerances.leak_tol <= 1.0)) rsim.fail("leak_tol", "leak_tol must lie in [0, 1]");
  if (!(e.tolerances.floor_tol >= 0.0 && e.tolerances.floor_tol <= 1.0)) rsim.fail("floor_tol", "floor_tol must lie in [0, 1]");
  try {
    validate(s);
  } catch (const ValidationError& err) {
    rsim.fail(err.key(), bare_message(err));
  } catch (const PreconditionError& err) {
    rsim.fail("scheme", err.what());
  }
  rsim.finish();

  Reader ra(raw, out, "approx", lines);
  ApproxSection& a = e.approx;
  a.alpha = ra.real("alpha", 0.5);
  a.scheme = ra.choice("scheme", "truncation", {"truncation", "fractional-weight", "geometric-bb2"});
  a.T = ra.real("T", 1.0);
  a.nodes = ra.reals("nodes", "");
  a.xi1 = ra.real("xi1", 1.0);
  a.ratio = ra.real("ratio", 6.4);
  const long long N = ra.integer("N", 4);
  if (N < 1 || N > 64) ra.fail("N", "N must lie in [1, 64]");
  a.N = static_cast<int>(N);
  const long long q = ra.integer("q", 1);
  if (q < 1 || q > 12) ra.fail("q", "q must lie in [1, 12]");
  a.q = static_cast<int>(q);
  a.study = ra.choice("study", "none", {"none", "truncation", "fractional-weight", "geometric-bb2"});
  a.sweep = ra.reals("sweep", a.study == "truncation" ? "10,100,1000,10000" : "2,4,6,8");
  a.t_grid = ra.reals("t_grid", "0.1,0.5,1,2");
  for (double t : a.t_grid) {
    if (!(t > 0.0)) ra.fail("t_grid", "t_grid must exclude t <= 0");
  }
  guarded(ra, [&] { return approx_scheme(a); });
  if (a.study != "none" && !std::holds_alternative<CIRParams>(e.model.family())) {
    ra.fail("study", "the condition study needs model.family = cir");
  }
  ra.finish();

  Reader ro(raw, out, "output", lines);
  e.output.format = ro.choice("format", "json", {"json", "csv"});
  e.output.path = ro.text("path", "");
  e.output.paths_csv = ro.text("paths_csv", "");
  ro.finish();
  return e;
}

}  // namespace vfeller::config
