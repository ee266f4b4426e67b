#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vfeller/errors.hpp"
#include "vfeller/kernels.hpp"
#include "vfeller/special.hpp"

using namespace vfeller;
using doctest::Approx;

TEST_CASE("gamma matches sqrt(pi) and factorials") {
  CHECK(special::gamma(0.5) == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  double f = 1.0;
  for (int n = 1; n <= 10; ++n) {
    CHECK(special::gamma(n) == Approx(f).epsilon(1e-12));
    f *= n;
  }
  for (double x : {0.1, 0.3, 0.7, 1.5, 3.3, 7.9}) {
    CHECK(special::gamma(x) == Approx(std::tgamma(x)).epsilon(1e-12));
    CHECK(special::log_gamma(x) == Approx(std::lgamma(x)).epsilon(1e-12));
  }
}

TEST_CASE("pointwise examples") {
  CHECK(eval(KernelSpec::constant(2.0), 7.0) == 2.0);
  CHECK(eval(KernelSpec::sum_of_exponentials({1, 2}, {0.5, 3}), 0.0) == 3.0);
  CHECK(eval(KernelSpec::truncated_fractional(0.5, 1.0), 0.0) ==
        Approx(2.0 / std::numbers::pi).epsilon(1e-10));
  CHECK_THROWS_AS(eval(KernelSpec::constant(1.0), -1.0), DomainError);
}

TEST_CASE("scalars") {
  auto s = k0_kprime0(KernelSpec::sum_of_exponentials({1, 2}, {0.5, 3}));
  CHECK(s.k0 == 3.0);
  CHECK(s.kp0 == -6.5);
  s = k0_kprime0(KernelSpec::constant(1.0));
  CHECK(s.k0 == 1.0);
  CHECK(s.kp0 == 0.0);
  s = k0_kprime0(KernelSpec::truncated_fractional(0.5, 1.0));
  CHECK(s.k0 == Approx(2.0 / std::numbers::pi).epsilon(1e-10));
  CHECK(s.kp0 == Approx(-1.0 / (1.5 * std::numbers::pi)).epsilon(1e-10));
  for (double a : {0.2, 0.5, 0.8}) {
    for (double T : {0.5, 4.0, 1e3}) {
      s = k0_kprime0(KernelSpec::truncated_fractional(a, T));
      CHECK(s.k0 == Approx(oracle::frac_k0(a, T)).epsilon(1e-10));
      CHECK(s.kp0 == Approx(oracle::frac_kp0(a, T)).epsilon(1e-10));
    }
  }
  CHECK(k0_kprime0(KernelSpec::truncated_fractional(0.5, 4.0)).k0 == Approx(4.0 / std::numbers::pi));
}

TEST_CASE("eval at zero agrees with K0 and forward difference with Kp0") {
  const KernelSpec ks[] = {KernelSpec::constant(1.7), KernelSpec::sum_of_exponentials({1, 2}, {0.5, 3}),
                           KernelSpec::truncated_fractional(0.3, 2.0),
                           KernelSpec::truncated_fractional(0.7, 50.0)};
  for (const auto& k : ks) {
    const auto s = k0_kprime0(k);
    CHECK(eval(k, 0.0) == Approx(s.k0).epsilon(1e-10));
    const double h = 1e-6;
    const double fd = (eval(k, h) - eval(k, 0.0)) / h;
    if (s.kp0 == 0.0) {
      CHECK(std::abs(fd) < 1e-8);
    } else {
      CHECK(fd == Approx(s.kp0).epsilon(1e-4));
    }
    CHECK(eval_derivative(k, 0.0) == Approx(s.kp0).epsilon(1e-10));
  }
}

TEST_CASE("fractional quadrature against Simpson oracle after substitution") {
  // u = x^{1-a} removes the singularity: dx x^{-a} = du / (1-a).
  const double a = 0.5, T = 3.0;
  for (double t : {0.1, 1.0, 2.5}) {
    auto f = [&](double u) { return std::exp(-std::pow(u, 1.0 / (1 - a)) * t) / (1 - a); };
    const double ref = oracle::simpson(f, 0.0, std::pow(T, 1 - a)) / (std::tgamma(a) * std::tgamma(1 - a));
    CHECK(eval(KernelSpec::truncated_fractional(a, T), t) == Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("monotonicity") {
  const auto se = KernelSpec::sum_of_exponentials({1, 2, 0.5}, {0.1, 3, 20});
  double prev = eval(se, 0.0);
  for (int i = 1; i <= 200; ++i) {
    const double cur = eval(se, 0.05 * i);
    CHECK(cur <= prev);
    prev = cur;
  }
  // Upward convergence in T toward the fractional kernel.
  for (double t : {0.2, 1.0, 3.0}) {
    // Strict while the added mass e^{-xt} on [T, 10T] is above rounding.
    double last = 0.0;
    for (double T : {1.0, 10.0, 100.0, 1000.0}) {
      const double k = eval(KernelSpec::truncated_fractional(0.4, T), t);
      if (T * t < 30.0) CHECK(k > last);
      else CHECK(k >= last * (1 - 1e-14));
      last = k;
    }
    CHECK(last <= std::pow(t, -0.6) / std::tgamma(0.4) + 1e-12);
  }
  double last = 0.0;
  for (double T : {1.0, 2.0, 8.0, 64.0}) {
    const double k = k0_kprime0(KernelSpec::truncated_fractional(0.5, T)).k0;
    CHECK(k > last);
    last = k;
  }
}

TEST_CASE("integral") {
  const auto se = KernelSpec::sum_of_exponentials({1, 2}, {0.5, 3});
  const double t = 1.3;
  CHECK(eval_integral(se, t) == Approx(2 * (1 - std::exp(-0.5 * t)) + 2.0 / 3 * (1 - std::exp(-3 * t))));
  CHECK(eval_integral(KernelSpec::constant(2.0), 1.5) == 3.0);
  const auto fr = KernelSpec::truncated_fractional(0.5, 2.0);
  auto f = [&](double s) { return eval(fr, s); };
  CHECK(eval_integral(fr, 0.7) == Approx(oracle::simpson(f, 0.0, 0.7, 400)).epsilon(1e-9));
}

TEST_CASE("validation") {
  auto key_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      return e.key();
    }
    return std::string("none");
  };
  CHECK(key_of([] { KernelSpec::constant(0.0); }) == "level");
  CHECK(key_of([] { KernelSpec::sum_of_exponentials({1}, {1, 2}); }) != "none");
  CHECK(key_of([] { KernelSpec::sum_of_exponentials({-1}, {1}); }) != "none");
  CHECK(key_of([] { KernelSpec::truncated_fractional(1.2, 1.0); }) == "alpha");
  CHECK(key_of([] { KernelSpec::truncated_fractional(0.5, 0.0); }) == "T");
  CHECK(KernelSpec::constant(1.0) == KernelSpec::constant(1.0));
  CHECK_FALSE(KernelSpec::constant(1.0) == KernelSpec::constant(2.0));
}
