#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vfeller/errors.hpp"
#include "vfeller/fracapprox.hpp"
#include "vfeller/resolvent.hpp"

using namespace vfeller;
using doctest::Approx;

namespace {

double moment(const GaussRule& r, int k) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
  return s;
}

double max_rel_error(const ApproxScheme& s) {
  std::vector<double> grid;
  for (int i = 0; i <= 19; ++i) grid.push_back(0.1 + 0.1 * i);
  double worst = 0.0;
  for (const auto& row : approximation_error(s, grid)) worst = std::max(worst, row.rel_error);
  return worst;
}

}  // namespace

TEST_CASE("single interval q = 1") {
  const auto r = fractional_gauss_rule(0.5, 0.0, 1.0, 1);
  REQUIRE(r.nodes.size() == 1);
  CHECK(r.weights[0] == Approx(2 / std::numbers::pi).epsilon(1e-12));
  CHECK(r.nodes[0] == Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("per-interval moment matching") {
  for (double a : {0.3, 0.5, 0.7}) {
    const auto nodes = geometric_nodes(1.0, 6.4, 4);
    for (int q = 1; q <= 4; ++q) {
      for (std::size_t n = 0; n + 1 < nodes.size(); ++n) {
        const double lo = n == 0 ? 0.0 : nodes[n];
        const double hi = nodes[n + 1];
        const auto r = fractional_gauss_rule(a, lo, hi, q);
        const auto ru = unit_gauss_rule(lo, hi, q);
        for (int k = 0; k < 2 * q; ++k) {
          CHECK(moment(r, k) == Approx(oracle::frac_moment(a, lo, hi, k)).epsilon(1e-12));
          const double mu = (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
          CHECK(moment(ru, k) == Approx(mu).epsilon(1e-12));
        }
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
          CHECK(r.weights[i] > 0.0);
          CHECK(r.nodes[i] > lo);
          CHECK(r.nodes[i] < hi);
        }
      }
    }
  }
}

TEST_CASE("kernel scalars equal the analytic expressions") {
  for (double a : {0.3, 0.5, 0.7}) {
    for (int q = 1; q <= 3; ++q) {
      for (auto w : {QuadratureWeight::FractionalWeight, QuadratureWeight::GeometricBB2}) {
        const auto s = ApproxScheme::geometric(a, 1.0, 6.4, 4, q, w);
        const auto ks = k0_kprime0(build_kernel(s));
        const auto an = analytic_scalars(s);
        CHECK(ks.k0 == Approx(an.k0).epsilon(1e-10));
        CHECK(ks.kp0 == Approx(an.kp0).epsilon(1e-10));
      }
      // Fractional weight over [0, xi_N]: the truncation scalars at T = xi_N.
      const auto s = ApproxScheme::geometric(a, 1.0, 6.4, 4, q, QuadratureWeight::FractionalWeight);
      const double T = std::pow(6.4, 3);
      CHECK(analytic_scalars(s).k0 == Approx(oracle::frac_k0(a, T)).epsilon(1e-10));
      CHECK(analytic_scalars(s).kp0 == Approx(oracle::frac_kp0(a, T)).epsilon(1e-10));
    }
  }
  const auto tr = analytic_scalars(ApproxScheme::truncation(0.5, 1.0));
  CHECK(tr.k0 == Approx(2 / std::numbers::pi).epsilon(1e-10));
  CHECK(tr.kp0 == Approx(-1 / (1.5 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("BB2 scalars grow like xi_N and xi_N^2 / 2") {
  double prev0 = INFINITY, prev1 = INFINITY;
  for (int N = 2; N <= 8; ++N) {
    const auto s = ApproxScheme::geometric(0.4, 1.0, 6.4, N, 1, QuadratureWeight::GeometricBB2);
    const auto ks = k0_kprime0(build_kernel(s));
    const double xn = std::pow(6.4, N - 1);
    const double e0 = std::abs(ks.k0 / xn - 1);
    const double e1 = std::abs(ks.kp0 / (-xn * xn / 2) - 1);
    CHECK(e0 < prev0);
    CHECK(e1 < prev1);
    prev0 = e0;
    prev1 = e1;
  }
  CHECK(prev0 < 1e-4);
  CHECK(prev1 < 1e-4);
}

TEST_CASE("approximation error") {
  const auto rows = approximation_error(ApproxScheme::truncation(0.5, 1e4), {1.0});
  // Oracle for the tail int_T^inf e^{-x} x^{-a} dx / (Gamma(a) Gamma(1 - a)).
  const double tail = oracle::simpson([](double x) { return std::exp(-x) / std::sqrt(x); }, 1e4, 1e4 + 60, 2000) /
                      std::numbers::pi;
  CHECK(rows[0].rel_error < 1e-2);
  CHECK(std::abs(rows[0].exact - rows[0].approx) <= tail + 1e-14 * rows[0].exact);
  const auto r10 = approximation_error(ApproxScheme::truncation(0.5, 10.0), {1.0});
  const double tail10 =
      oracle::simpson([](double u) { return 2.0 * std::exp(-u * u); }, std::sqrt(10.0), 12.0) / std::numbers::pi;
  CHECK(r10[0].exact - r10[0].approx == Approx(tail10).epsilon(1e-8));
  CHECK(rows[0].exact == Approx(1 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(approximation_error(ApproxScheme::truncation(0.5, 10), {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(fractional_kernel(0.5, 0.0), DomainError);
}

TEST_CASE("doubling N does not worsen the fit on [0.1, 2]") {
  for (double a : {0.3, 0.6}) {
    double prev = INFINITY;
    for (int N : {2, 4, 8, 16}) {
      const double e = max_rel_error(ApproxScheme::geometric(a, 1.0, 2.0, N, 2, QuadratureWeight::FractionalWeight));
      CHECK(e <= prev);
      prev = e;
    }
  }
}

TEST_CASE("quadrature kernels satisfy the resolvent hypotheses") {
  for (auto w : {QuadratureWeight::FractionalWeight, QuadratureWeight::GeometricBB2}) {
    const auto k = build_kernel(ApproxScheme::geometric(0.6, 1.0, 6.4, 3, 2, w));
    CHECK(check_hypotheses(solve_resolvent(k, 1e-3, 1.0)).all());
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(fractional_gauss_rule(0.5, 0, 1, 0), ValidationError);
  CHECK_THROWS_AS(fractional_gauss_rule(0.5, 0, 1, 13), ValidationError);
  CHECK_THROWS_AS(fractional_gauss_rule(0.5, 1, 1, 1), ValidationError);
  CHECK_THROWS_AS(ApproxScheme::truncation(1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(ApproxScheme::geometric(0.5, 1.0, 1.0, 4, 1, QuadratureWeight::FractionalWeight), ValidationError);
  CHECK_THROWS_AS(ApproxScheme::quadrature(0.5, {0.5, 1.0}, 1, QuadratureWeight::GeometricBB2), ValidationError);
  CHECK_THROWS_AS(gaussian_quadrature_kernel(ApproxScheme::truncation(0.5, 1.0)), PreconditionError);
  const auto g = geometric_nodes(1.0, 6.4, 3);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 0.0);
  CHECK(g[3] == Approx(6.4 * 6.4));
}
