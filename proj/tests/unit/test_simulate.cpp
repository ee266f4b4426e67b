#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vfeller/errors.hpp"
#include "vfeller/feller.hpp"
#include "vfeller/philox.hpp"
#include "vfeller/simulate.hpp"

using namespace vfeller;

namespace {

ModelSpec brownian(double x0 = 0.0) {
  return ModelSpec::custom([](double) { return 0.0; }, [](double) { return 1.0; }, -INFINITY, INFINITY, x0);
}

const KernelSpec kSum = KernelSpec::sum_of_exponentials({1, 2}, {0.5, 3});

// Fine increments summed into coarser ones so every dt sees the same Brownian path.
std::vector<double> coarsen(const std::vector<double>& fine, int agg) {
  std::vector<double> out(fine.size() / agg, 0.0);
  for (std::size_t k = 0; k < fine.size(); ++k) out[k / agg] += fine[k];
  return out;
}

}  // namespace

TEST_CASE("Philox known answers") {
  auto b = Philox4x32(0)({0, 0, 0, 0});
  CHECK(b == Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  b = Philox4x32(~0ull)({~0u, ~0u, ~0u, ~0u});
  CHECK(b == Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("increment streams") {
  const auto a = brownian_increments(5, 3, 101, 0.01);
  CHECK(a.size() == 101);
  CHECK(a == brownian_increments(5, 3, 101, 0.01));
  CHECK(a != brownian_increments(5, 4, 101, 0.01));
  CHECK(a != brownian_increments(6, 3, 101, 0.01));
  // Prefix-stable: a longer path shares its first steps.
  const auto longer = brownian_increments(5, 3, 300, 0.01);
  CHECK(std::equal(a.begin(), a.end(), longer.begin()));
}

TEST_CASE("Brownian statistics") {
  SimConfig c;
  c.model = brownian();
  c.n_paths = 10000;
  c.seed = 7;
  const auto r = simulate(c);
  CHECK(std::abs(r.mean_terminal) <= 4.0 / std::sqrt(10000.0));
  CHECK(std::abs(r.var_terminal - 1.0) <= 0.05);
  CHECK(r.hit_fraction_left == 0.0);
  CHECK(r.n_surviving == 10000);
  CHECK_FALSE(r.quantiles_left.has_value());
  CHECK(r.n_steps == 1000);
}

TEST_CASE("determinism across runs and thread counts") {
  SimConfig c;
  c.model = ModelSpec::cir(1, 0.125, 1, 0.2);
  c.horizon = 1;
  c.n_paths = 300;
  c.seed = 99;
  c.threads = 1;
  const auto a = simulate(c);
  c.threads = 4;
  const auto b = simulate(c);
  const auto b2 = simulate(c);
  CHECK(a.hit_fraction_left > 0.0);
  for (const auto* r : {&b, &b2}) {
    CHECK(r->hit_fraction_left == a.hit_fraction_left);
    CHECK(r->mean_terminal == a.mean_terminal);
    CHECK(r->var_terminal == a.var_terminal);
    REQUIRE(r->quantiles_left.has_value());
    CHECK(r->quantiles_left->p50 == a.quantiles_left->p50);
    for (int p = 0; p < c.n_paths; ++p) {
      CHECK(r->paths[p].terminal == a.paths[p].terminal);
      CHECK(r->paths[p].hit_time == a.paths[p].hit_time);
    }
  }
  CHECK(a.quantiles_left->p10 <= a.quantiles_left->p50);
  CHECK(a.quantiles_left->p50 <= a.quantiles_left->p90);
}

TEST_CASE("constant kernel is classical Euler-Maruyama") {
  const double K = 0.8;
  for (auto scheme : {SimScheme::ConvolutionEuler, SimScheme::MarkovianLift}) {
    SimConfig c;
    c.model = ModelSpec::cir(1.5, 0.4, 0.6, 0.5);
    c.kernel = KernelSpec::constant(K);
    c.scheme = scheme;
    c.dt = 1e-3;
    c.hit_eps = 1e-4;
    c.blowup_cap = 1e6;
    for (int p = 0; p < 20; ++p) {
      const auto dW = brownian_increments(1, p, 1000, c.dt);
      double x = 0.5;
      bool hit = false;
      for (double w : dW) {
        const double xh = std::max(x, 0.0);
        x += K * (1.5 * (0.4 - xh) * c.dt + 0.6 * std::sqrt(xh) * w);
        if (x <= 1e-4) {
          hit = true;
          break;
        }
      }
      const auto o = simulate_path(c, dW);
      CHECK((o.hit != HitSide::None) == hit);
      CHECK(o.terminal == x);
    }
  }
}

TEST_CASE("lift and convolution agree to first order") {
  double prev = 0.0;
  const auto fine_of = [](int p) { return brownian_increments(11, p, 2000, 5e-4); };
  for (int agg : {4, 2, 1}) {
    SimConfig c;
    c.model = ModelSpec::cir(1, 1, 0.5, 1);
    c.kernel = kSum;
    c.dt = 5e-4 * agg;
    c.hit_eps = 1e-4;
    c.blowup_cap = 1e6;
    double worst = 0.0;
    for (int p = 0; p < 20; ++p) {
      const auto dW = coarsen(fine_of(p), agg);
      c.scheme = SimScheme::ConvolutionEuler;
      const auto a = simulate_path(c, dW);
      c.scheme = SimScheme::MarkovianLift;
      const auto b = simulate_path(c, dW);
      worst = std::max(worst, std::abs(a.terminal - b.terminal));
    }
    if (prev > 0.0) CHECK(prev / worst >= 1.8);
    prev = worst;
  }
}

TEST_CASE("truncation keeps CIR and Jacobi finite at coarse dt") {
  for (const auto& m : {ModelSpec::cir(5, 0.05, 2, 0.05), ModelSpec::jacobi(0, 1, 4, 0.5, 3, 0.5)}) {
    SimConfig c;
    c.model = m;
    c.kernel = kSum;
    c.dt = 0.05;
    c.horizon = 5;
    c.n_paths = 200;
    const auto r = simulate(c);
    for (const auto& o : r.paths) CHECK(std::isfinite(o.terminal));
  }
}

TEST_CASE("superlinear drift blows up") {
  SimConfig c;
  c.model = ModelSpec::power(2, 0, 0.5, 1);
  c.kernel = KernelSpec::constant(0.5);
  c.horizon = 3;
  c.n_paths = 200;
  const auto r = simulate(c);
  CHECK(r.hit_fraction_right > 0.5);
  CHECK(r.quantiles_right.has_value());
}

TEST_CASE("preconditions and validation") {
  SimConfig c;
  c.kernel = KernelSpec::truncated_fractional(0.5, 10);
  c.scheme = SimScheme::MarkovianLift;
  CHECK_THROWS_AS(simulate(c), PreconditionError);
  auto key_of = [](SimConfig s) {
    try {
      validate(s);
    } catch (const ValidationError& e) {
      return e.key();
    }
    return std::string("none");
  };
  SimConfig d;
  CHECK(key_of(d) == "none");
  d.dt = 2.0;
  CHECK(key_of(d) == "dt");
  d = {};
  d.n_paths = 0;
  CHECK(key_of(d) == "n_paths");
  d = {};
  d.horizon = -1;
  CHECK(key_of(d) == "horizon");
  d = {};
  d.blowup_cap = 0.5;
  CHECK(key_of(d) == "blowup_cap");
  CHECK(default_hit_eps(ModelSpec::jacobi(0, 2, 1, 1, 1, 1)) == doctest::Approx(2e-4));
  CHECK(default_blowup_cap(ModelSpec::cir(1, 1, 1, 3)) == 3e6);
}

TEST_CASE("NaN states are reported with the path") {
  SimConfig c;
  c.model = ModelSpec::custom([](double x) { return x > 0.5 ? NAN : 0.0; }, [](double) { return 1.0; }, -INFINITY,
                              INFINITY, 0.0);
  c.n_paths = 50;
  c.threads = 1;
  try {
    simulate(c);
    FAIL("expected a NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("on path") != std::string::npos);
  }
}

TEST_CASE("crosscheck") {
  const auto k = KernelSpec::constant(1.0);
  SimConfig c;
  c.kernel = k;
  c.horizon = 5;
  c.dt = 1e-3;
  c.n_paths = 400;
  c.seed = 3;
  c.model = ModelSpec::cir(1, 1, 1, 0.2);
  auto rep = verdict_crosscheck(c.model, k, c, family_test(c.model, k), {});
  CHECK(rep.all_consistent());
  c.model = ModelSpec::cir(1, 0.125, 1, 0.2);
  rep = verdict_crosscheck(c.model, k, c, family_test(c.model, k), {});
  CHECK(rep.all_consistent());
  bool saw_exit = false;
  for (const auto& e : rep.entries) {
    if (e.verdict.verdict == Verdict::ExitsWithPositiveProb) {
      saw_exit = true;
      CHECK(e.observed > 0.5);
    }
  }
  CHECK(saw_exit);

  CHECK_THROWS_AS(verdict_crosscheck(ModelSpec::cir(1, 1, 1, 0.2), k, c, {}, {}), PreconditionError);
  CHECK_THROWS_AS(verdict_crosscheck(c.model, KernelSpec::constant(2.0), c, {}, {}), PreconditionError);

  // Rules applied to a synthetic report.
  SimulationReport sr;
  sr.hit_fraction_left = 0.03;
  sr.hit_fraction_right = 0.01;
  BoundaryVerdict no{Boundary::Both, Verdict::NoExitAS, "", {}, {}};
  BoundaryVerdict ex{Boundary::Both, Verdict::ExitsWithPositiveProb, "", {}, {}};
  BoundaryVerdict inc{Boundary::Left, Verdict::Inconclusive, "", {}, {}};
  const auto es = compare_verdicts(sr, {no, ex, inc}, {0.02, 0.05});
  CHECK(es[0].observed == 0.03);
  CHECK_FALSE(es[0].consistent);
  CHECK(es[1].observed == doctest::Approx(0.04));
  CHECK_FALSE(es[1].consistent);
  CHECK(es[2].consistent);
}
