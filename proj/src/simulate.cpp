#include "vfeller/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "vfeller/errors.hpp"
#include "vfeller/philox.hpp"

namespace vfeller {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int step_count(const SimConfig& c) {
  return static_cast<int>(std::llround(c.horizon / c.dt));
}

SimConfig resolved(const SimConfig& c) {
  SimConfig r = c;
  if (!(r.hit_eps > 0.0)) r.hit_eps = default_hit_eps(r.model);
  if (!(r.blowup_cap > 0.0)) r.blowup_cap = default_blowup_cap(r.model);
  return r;
}

int thread_count(const SimConfig& c) {
  int n = c.threads > 0 ? c.threads : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VOLTERRA_FELLER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::clamp(n, 1, std::max(1, c.n_paths));
}

// Type-7 sample quantile of sorted data.
double quantile(const std::vector<double>& s, double p) {
  const double h = (s.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - lo) * (s[hi] - s[lo]);
}

std::optional<HitQuantiles> hit_quantiles(std::vector<double> times) {
  if (times.empty()) return std::nullopt;
  std::sort(times.begin(), times.end());
  return HitQuantiles{quantile(times, 0.1), quantile(times, 0.5), quantile(times, 0.9)};
}

}  // namespace

const char* to_string(SimScheme s) {
  return s == SimScheme::ConvolutionEuler ? "convolution-euler" : "markovian-lift";
}

double default_hit_eps(const ModelSpec& m) {
  if (m.bounded()) return 1e-4 * (m.r() - m.l());
  return 1e-4 * std::max(1.0, std::abs(m.x0()));
}

double default_blowup_cap(const ModelSpec& m) { return 1e6 * std::max(1.0, std::abs(m.x0())); }

void validate(const SimConfig& c) {
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw ValidationError("horizon", "horizon must be positive");
  if (!(c.dt > 0.0) || !(c.dt < c.horizon)) throw ValidationError("dt", "need 0 < dt < horizon");
  if (c.n_paths < 1) throw ValidationError("n_paths", "n_paths must be positive");
  if (c.hit_eps < 0.0 || !std::isfinite(c.hit_eps)) throw ValidationError("hit_eps", "hit_eps must be positive");
  const SimConfig r = resolved(c);
  if (!(r.blowup_cap > std::max(std::abs(r.model.x0()), 1.0)) || !std::isfinite(r.blowup_cap)) {
    throw ValidationError("blowup_cap", "blowup_cap must exceed max(|x0|, 1)");
  }
  if (c.scheme == SimScheme::MarkovianLift &&
      std::holds_alternative<TruncatedFractional>(c.kernel.variant())) {
    throw PreconditionError("the Markovian lift needs a constant or sum-of-exponentials kernel");
  }
}

std::vector<double> brownian_increments(std::uint64_t seed, int path, int n_steps, double dt) {
  const Philox4x32 rng(seed);
  const double sq = std::sqrt(dt);
  std::vector<double> dW(n_steps);
  for (int k = 0; k < n_steps; k += 2) {
    const auto z = rng.normals(static_cast<std::uint64_t>(path), static_cast<std::uint64_t>(k / 2));
    dW[k] = sq * z[0];
    if (k + 1 < n_steps) dW[k + 1] = sq * z[1];
  }
  return dW;
}

PathOutcome simulate_path(const SimConfig& c, std::span<const double> dW) {
  const ModelSpec& m = c.model;
  const double dt = c.dt;
  const int n = static_cast<int>(dW.size());
  const double l = m.l();
  const double r = m.r();
  auto truncate = [&](double x) { return std::clamp(x, l, r); };
  auto increment = [&](double x, int k) {
    const double xh = truncate(x);
    return m.drift(xh) * dt + m.diffusion(xh) * dW[k];
  };

  PathOutcome out;
  auto check = [&](double x, int k) {
    if (std::isnan(x)) {
      std::ostringstream msg;
      msg << "scheme instability: NaN state at step " << k + 1;
      throw NumericError(msg.str(), x);
    }
    const bool left = std::isfinite(l) ? x <= l + c.hit_eps : x <= -c.blowup_cap;
    const bool right = std::isfinite(r) ? x >= r - c.hit_eps : x >= c.blowup_cap;
    if (left || right) {
      out.hit = left ? HitSide::Left : HitSide::Right;
      out.hit_time = (k + 1) * dt;
      out.terminal = x;
      return true;
    }
    return false;
  };

  double x = m.x0();
  const auto& kv = c.kernel.variant();
  if (const auto* k = std::get_if<ConstantKernel>(&kv)) {
    // Both schemes reduce to classical Euler-Maruyama with diffusion scaled by K0.
    for (int j = 0; j < n; ++j) {
      x += k->level * increment(x, j);
      if (check(x, j)) return out;
    }
  } else if (c.scheme == SimScheme::MarkovianLift) {
    const auto& se = std::get<SumOfExponentials>(kv);
    const std::size_t nf = se.weights.size();
    std::vector<double> y(nf, 0.0);
    for (int j = 0; j < n; ++j) {
      const double inc = increment(x, j);
      x = m.x0();
      for (std::size_t f = 0; f < nf; ++f) {
        y[f] += -se.rates[f] * y[f] * dt + inc;
        x += se.weights[f] * y[f];
      }
      if (check(x, j)) return out;
    }
  } else {
    std::vector<double> ktab(n + 1);
    for (int i = 1; i <= n; ++i) ktab[i] = eval(c.kernel, i * dt);
    std::vector<double> inc(n);
    for (int k = 0; k < n; ++k) {
      inc[k] = increment(x, k);
      double acc = 0.0;
      for (int j = 0; j <= k; ++j) acc += ktab[k + 1 - j] * inc[j];
      x = m.x0() + acc;
      if (check(x, k)) return out;
    }
  }
  out.terminal = x;
  return out;
}

SimulationReport simulate(const SimConfig& config) {
  validate(config);
  const SimConfig c = resolved(config);
  const int n_steps = step_count(c);
  if (n_steps < 1) throw ValidationError("dt", "horizon / dt rounds to zero steps");

  SimulationReport rep;
  rep.scheme = c.scheme;
  rep.dt = c.dt;
  rep.n_steps = n_steps;
  rep.n_paths = c.n_paths;
  rep.seed = c.seed;
  rep.hit_eps = c.hit_eps;
  rep.blowup_cap = c.blowup_cap;
  rep.paths.resize(c.n_paths);

  const int nt = thread_count(c);
  std::vector<std::exception_ptr> errors(c.n_paths);
  auto worker = [&](int tid) {
    for (int p = tid; p < c.n_paths; p += nt) {
      try {
        const auto dW = brownian_increments(c.seed, p, n_steps, c.dt);
        rep.paths[p] = simulate_path(c, dW);
      } catch (const NumericError& e) {
        std::ostringstream msg;
        msg << e.what() << " on path " << p;
        errors[p] = std::make_exception_ptr(NumericError(msg.str(), e.achieved()));
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker, t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Reduction in path order keeps the report independent of the thread count.
  std::vector<double> tl, tr;
  double sum = 0.0;
  int surv = 0;
  for (const auto& o : rep.paths) {
    if (o.hit == HitSide::Left) tl.push_back(o.hit_time);
    else if (o.hit == HitSide::Right) tr.push_back(o.hit_time);
    else {
      sum += o.terminal;
      ++surv;
    }
  }
  rep.hit_fraction_left = static_cast<double>(tl.size()) / c.n_paths;
  rep.hit_fraction_right = static_cast<double>(tr.size()) / c.n_paths;
  rep.quantiles_left = hit_quantiles(std::move(tl));
  rep.quantiles_right = hit_quantiles(std::move(tr));
  rep.n_surviving = surv;
  rep.mean_terminal = surv > 0 ? sum / surv : kNaN;
  double ss = 0.0;
  for (const auto& o : rep.paths) {
    if (o.hit == HitSide::None) ss += (o.terminal - rep.mean_terminal) * (o.terminal - rep.mean_terminal);
  }
  rep.var_terminal = surv > 1 ? ss / (surv - 1) : kNaN;
  return rep;
}

bool CrosscheckReport::all_consistent() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.consistent; });
}

std::vector<CrosscheckEntry> compare_verdicts(const SimulationReport& rep,
                                              const std::vector<BoundaryVerdict>& verdicts,
                                              const CrosscheckTolerances& tol) {
  std::vector<CrosscheckEntry> out;
  for (const auto& v : verdicts) {
    CrosscheckEntry e;
    e.verdict = v;
    const double fl = rep.hit_fraction_left;
    const double fr = rep.hit_fraction_right;
    switch (v.verdict) {
      case Verdict::NoExitAS:
      case Verdict::SupBoundedAS:
      case Verdict::InfBoundedAS:
        e.observed = v.boundary == Boundary::Left ? fl : v.boundary == Boundary::Right ? fr : std::max(fl, fr);
        e.required = tol.leak_tol;
        e.rule = "<= leak_tol";
        e.consistent = e.observed <= tol.leak_tol;
        break;
      case Verdict::ExitsWithPositiveProb:
        e.observed = v.boundary == Boundary::Left ? fl : v.boundary == Boundary::Right ? fr : fl + fr;
        e.required = tol.floor_tol;
        e.rule = ">= floor_tol";
        e.consistent = e.observed >= tol.floor_tol;
        break;
      default:
        e.rule = "none";
        e.consistent = true;
    }
    out.push_back(std::move(e));
  }
  return out;
}

CrosscheckReport verdict_crosscheck(const ModelSpec& model, const KernelSpec& kernel,
                                    const SimConfig& sim,
                                    const std::vector<BoundaryVerdict>& verdicts,
                                    const CrosscheckTolerances& tol) {
  if (!sim.model.same_as(model) || !(sim.kernel == kernel)) {
    throw PreconditionError("verdicts and simulation refer to different model/kernel pairs");
  }
  if (!(tol.leak_tol >= 0.0 && tol.leak_tol <= 1.0)) throw ValidationError("leak_tol", "leak_tol must lie in [0, 1]");
  if (!(tol.floor_tol >= 0.0 && tol.floor_tol <= 1.0)) throw ValidationError("floor_tol", "floor_tol must lie in [0, 1]");
  CrosscheckReport rep;
  rep.simulation = simulate(sim);
  rep.entries = compare_verdicts(rep.simulation, verdicts, tol);
  return rep;
}

}  // namespace vfeller
