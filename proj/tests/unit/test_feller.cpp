#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vfeller/errors.hpp"
#include "vfeller/feller.hpp"

using namespace vfeller;

namespace {

const KernelSpec kOne = KernelSpec::constant(1.0);

ModelSpec custom(std::function<double(double)> b, double l, double r, double x0) {
  return ModelSpec::custom(std::move(b), [](double) { return 1.0; }, l, r, x0);
}

bool has(const std::vector<BoundaryVerdict>& vs, Boundary b, Verdict v) {
  return std::any_of(vs.begin(), vs.end(), [&](const auto& x) { return x.boundary == b && x.verdict == v; });
}

std::vector<BoundaryVerdict> decisive(std::vector<BoundaryVerdict> vs) {
  std::erase_if(vs, [](const auto& v) { return !is_decisive(v.verdict); });
  return vs;
}

void check_evidence(const BoundaryVerdict& v) {
  if (v.verdict != Verdict::Inconclusive) CHECK_FALSE(v.evidence.empty());
}

}  // namespace

TEST_CASE("necessary test") {
  // Threshold 0.5 * (4 - 2) = 1 > x0 = 0.5.
  const auto m = ModelSpec::cir(1, 1, 2, 0.5);
  const auto k = KernelSpec::sum_of_exponentials({1}, {1});
  const auto v = necessary_test(ScaleContext(m, k, 0.5), default_eps_shift(m));
  CHECK(v.verdict == Verdict::ExitsWithPositiveProb);
  CHECK(v.boundary == Boundary::Left);
  check_evidence(v);
  CHECK(has(family_test(m, k), Boundary::Left, Verdict::ExitsWithPositiveProb));

  const auto bm = custom([](double) { return 0.0; }, -INFINITY, INFINITY, 0.0);
  CHECK(necessary_test(ScaleContext(bm, kOne, 0.0), 1e-6).verdict == Verdict::NecessaryHolds);
  for (double x0 : {0.1, 1.0, 5.0}) {
    const auto cir = ModelSpec::cir(1, 1, 1, x0);
    CHECK(necessary_test(ScaleContext(cir, kOne, x0), 1e-6).verdict == Verdict::NecessaryHolds);
  }
  const auto low = ModelSpec::cir(1, 0.125, 1, 1.0);
  const auto lv = necessary_test(ScaleContext(low, kOne, 1.0), 1e-6);
  CHECK(lv.verdict == Verdict::ExitsWithPositiveProb);
  CHECK(lv.boundary == Boundary::Left);
}

TEST_CASE("sufficient test") {
  const auto jac = ModelSpec::jacobi(0, 1, 1, 0.5, std::sqrt(0.5), 0.5);
  auto v = sufficient_test(ScaleContext(jac, kOne, 0.5), 8);
  CHECK(v.verdict == Verdict::NoExitAS);
  CHECK(v.boundary == Boundary::Both);
  check_evidence(v);

  const auto pw = ModelSpec::power(2, 0, 1, 0.0);
  for (const auto& k : {kOne, KernelSpec::sum_of_exponentials({1, 2}, {0.5, 3})}) {
    const auto fv = family_test(pw, k);
    CHECK(has(fv, Boundary::Left, Verdict::NoExitAS));
  }

  const auto bm = custom([](double) { return 0.0; }, -INFINITY, INFINITY, 0.0);
  v = sufficient_test(ScaleContext(bm, kOne, 0.0), 8);
  CHECK(v.verdict == Verdict::NoExitAS);
  CHECK(v.boundary == Boundary::Both);
}

TEST_CASE("bounded interval test") {
  const auto jac = ModelSpec::jacobi(0, 1, 1, 0.5, std::sqrt(0.5), 0.5);
  CHECK_THROWS_AS(bounded_interval_test(ScaleContext(jac, kOne, 0.5)), PreconditionError);
  const auto cir = ModelSpec::cir(1, 1, 1, 1);
  CHECK_THROWS_AS(bounded_interval_test(ScaleContext(cir, kOne, 1.0)), PreconditionError);

  // p' = (x(1-x))^{-2}, v diverges at both ends.
  const auto repel = custom([](double x) { return 1.0 / x - 1.0 / (1.0 - x); }, 0, 1, 0.5);
  auto v = bounded_interval_test(ScaleContext(repel, kOne, 0.5));
  CHECK(v.verdict == Verdict::NoExitAS);
  CHECK(v.boundary == Boundary::Both);
  check_evidence(v);

  const auto bm = custom([](double) { return 0.0; }, 0, 1, 0.5);
  v = bounded_interval_test(ScaleContext(bm, kOne, 0.5));
  CHECK(v.verdict == Verdict::ExitsWithPositiveProb);
  CHECK(v.boundary == Boundary::Both);
}

TEST_CASE("sup and inf tests") {
  const auto bm = custom([](double) { return 0.0; }, 0, 1, 0.5);
  CHECK(sup_inf_test(ScaleContext(bm, kOne, 0.5), SupInfSide::Sup).verdict == Verdict::Inconclusive);
  CHECK(sup_inf_test(ScaleContext(bm, kOne, 0.5), SupInfSide::Inf).verdict == Verdict::Inconclusive);

  // Attracted towards a left edge where p stays finite, repelled from the right.
  const auto cir = ModelSpec::cir(0.25, 0.25, 1, 0.5);
  const auto v = sup_inf_test(ScaleContext(cir, kOne, 0.5), SupInfSide::Sup);
  CHECK(v.verdict == Verdict::SupBoundedAS);
  check_evidence(v);
  CHECK(has(family_test(cir, kOne), Boundary::Left, Verdict::ExitsWithPositiveProb));

  const auto jac = ModelSpec::jacobi(0, 1, 1, 0.1, 1, 0.5);
  CHECK(has(family_test(jac, kOne), Boundary::Right, Verdict::SupBoundedAS));
}

TEST_CASE("family examples") {
  for (const auto& k : {kOne, KernelSpec::sum_of_exponentials({0.5, 0.5}, {1, 2})}) {
    CHECK(has(family_test(ModelSpec::cir(1, 1, 1, 1), k), Boundary::Left, Verdict::NoExitAS));
  }
  const auto jac = ModelSpec::jacobi(0, 1, 1, 0.5, 1, 0.05);
  const auto jv = family_test(jac, KernelScalars{1.0, -1.0, true});
  CHECK(has(jv, Boundary::Left, Verdict::NoExitAS));
  CHECK(has(jv, Boundary::Right, Verdict::NoExitAS));
  CHECK_FALSE(has(jv, Boundary::Left, Verdict::ExitsWithPositiveProb));

  const auto pv = family_test(ModelSpec::power(1.5, 0.75, 1, 0), kOne);
  CHECK(has(pv, Boundary::Left, Verdict::NoExitAS));
  CHECK_FALSE(has(pv, Boundary::Right, Verdict::NoExitAS));
  CHECK_FALSE(has(pv, Boundary::Right, Verdict::ExitsWithPositiveProb));

  const auto bm = custom([](double) { return 0.0; }, -INFINITY, INFINITY, 0.0);
  CHECK_THROWS_AS(family_test(bm, kOne), PreconditionError);
  for (const auto& v : family_test(ModelSpec::cir(1, 0.2, 1.5, 0.3), KernelSpec::sum_of_exponentials({1}, {2})))
    check_evidence(v);
}

TEST_CASE("unverified hypotheses downgrade generic verdicts") {
  const auto low = ModelSpec::cir(1, 0.125, 1, 1.0);
  const ScaleContext ctx(low, KernelScalars::user_asserted(1.0, -0.5, false), 1.0);
  CHECK(necessary_test(ctx, 1e-6).verdict == Verdict::Inconclusive);
  CHECK(sufficient_test(ctx, 8).verdict == Verdict::Inconclusive);
}

TEST_CASE("sufficient never contradicts necessary") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int i = 0; i < 20; ++i) {
    const auto m = ModelSpec::cir(u(rng), u(rng), u(rng), u(rng));
    const auto k = KernelSpec::sum_of_exponentials({u(rng)}, {u(rng)});
    const auto fam = family_test(m, k);
    const auto nec = necessary_test(ScaleContext(m, k, m.x0()), default_eps_shift(m));
    if (nec.verdict == Verdict::ExitsWithPositiveProb) {
      CHECK_FALSE(has(fam, nec.boundary, Verdict::NoExitAS));
    }
  }
}

TEST_CASE("necessary threshold is monotone in x0") {
  const auto k = KernelSpec::sum_of_exponentials({1}, {1});
  bool passed = false;
  for (double x0 = 0.05; x0 < 3.0; x0 += 0.05) {
    const bool exits = has(family_test(ModelSpec::cir(1, 1, 2, x0), k), Boundary::Left,
                           Verdict::ExitsWithPositiveProb);
    if (passed) CHECK_FALSE(exits);
    passed = passed || !exits;
  }
  CHECK(passed);
}

TEST_CASE("Jacobi verdicts are affine invariant") {
  const KernelScalars ks{1.2, -0.8, true};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double th = 0.05 + 0.9 * u(rng);
    const double x0 = 0.02 + 0.96 * u(rng);
    const double kap = 0.2 + 2 * u(rng);
    const double sig = 0.2 + 1.5 * u(rng);
    const double s = 0.5 + 4 * u(rng);
    const double t = -3 + 6 * u(rng);
    const auto a = decisive(family_test(ModelSpec::jacobi(0, 1, kap, th, sig, x0), ks));
    const auto b = decisive(family_test(ModelSpec::jacobi(t, t + s, kap, t + s * th, sig, t + s * x0), ks));
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j].boundary == b[j].boundary);
      CHECK(a[j].verdict == b[j].verdict);
    }
  }
}

TEST_CASE("base point does not change the classification") {
  for (double th : {0.125, 1.0}) {
    const auto m = ModelSpec::cir(1, th, 1, 1.0);
    const auto a = necessary_test(ScaleContext(m, kOne, 1.0), 1e-6);
    const auto b = necessary_test(ScaleContext(m, kOne, 1.5), 1e-6);
    CHECK(a.verdict == b.verdict);
    CHECK(a.boundary == b.boundary);
  }
}

TEST_CASE("constant-kernel CIR iff matches the v limit") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double kap = u(rng), th = u(rng), sig = u(rng), k0 = 0.5 + 0.5 * u(rng);
    const auto m = ModelSpec::cir(kap, th, sig, 1.0);
    const auto k = KernelSpec::constant(k0);
    const bool feller = 2 * kap * th >= k0 * sig * sig;
    CHECK(has(family_test(m, k), Boundary::Left, Verdict::NoExitAS) == feller);
    const auto lim = boundary_limit(ScaleContext(m, k, 1.0), BoundarySide::Left, LimitTarget::TestV);
    CHECK((lim.kind == LimitKind::Divergent) == feller);
  }
}

TEST_CASE("condition study") {
  const double K = 2 / std::numbers::pi, Kp = 1 / (1.5 * std::numbers::pi);
  const auto rows = fractional_condition_study(0.5, SchemeKind::Truncation, {1, 1, 1}, {1.0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].k0 == doctest::Approx(K).epsilon(1e-10));
  CHECK(rows[0].threshold == doctest::Approx(K * K * K / (2 * Kp) - K * K / Kp).epsilon(1e-10));
  CHECK(rows[0].gap == doctest::Approx(2 - K).epsilon(1e-10));
  CHECK(asymptotic_regime(0.4, SchemeKind::Truncation) == Regime::Diverging);
  CHECK(asymptotic_regime(0.6, SchemeKind::Truncation) == Regime::Vanishing);
  CHECK(asymptotic_regime(0.6, SchemeKind::GeometricBB2) == Regime::Diverging);
}
