#include <doctest.h>

#include <cmath>

#include "vfeller/errors.hpp"
#include "vfeller/model.hpp"

using namespace vfeller;

namespace {
std::string key_of(auto&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.key();
  }
  return "none";
}
}  // namespace

TEST_CASE("intervals and coefficients") {
  const auto cir = ModelSpec::cir(2.0, 0.5, 0.3, 1.0);
  CHECK(cir.l() == 0.0);
  CHECK(std::isinf(cir.r()));
  CHECK(cir.drift(0.2) == doctest::Approx(2.0 * (0.5 - 0.2)));
  CHECK(cir.diffusion(0.25) == doctest::Approx(0.3 * 0.5));
  CHECK_FALSE(cir.bounded());

  const auto jac = ModelSpec::jacobi(-1.0, 3.0, 1.0, 0.0, 0.5, 1.0);
  CHECK(jac.bounded());
  CHECK(jac.l() == -1.0);
  CHECK(jac.r() == 3.0);
  CHECK(jac.diffusion(1.0) == doctest::Approx(0.5 * std::sqrt(2.0 * 2.0)));

  const auto pw = ModelSpec::power(2.0, 0.5, 1.5, -1.0);
  CHECK(std::isinf(pw.l()));
  CHECK(pw.drift(-2.0) == doctest::Approx(4.0));
  CHECK(pw.diffusion(-4.0) == doctest::Approx(1.5 * std::pow(4.0, 0.25)));
}

TEST_CASE("invariants name the offending key") {
  CHECK(key_of([] { ModelSpec::cir(-1.0, 1.0, 1.0, 1.0); }) == "kappa");
  CHECK(key_of([] { ModelSpec::cir(1.0, 0.0, 1.0, 1.0); }) == "theta");
  CHECK(key_of([] { ModelSpec::cir(1.0, 1.0, 0.0, 1.0); }) == "sigma");
  CHECK(key_of([] { ModelSpec::cir(1.0, 1.0, 1.0, 0.0); }) == "x0");
  CHECK(key_of([] { ModelSpec::jacobi(1.0, 0.0, 1.0, 0.5, 1.0, 0.5); }) == "b");
  CHECK(key_of([] { ModelSpec::jacobi(0.0, 1.0, 1.0, 1.0, 1.0, 0.5); }) == "theta");
  CHECK(key_of([] { ModelSpec::power(1.0, 0.0, 1.0, 0.0); }) == "alpha");
  CHECK(key_of([] { ModelSpec::power(2.0, 1.0, 1.0, 0.0); }) == "delta");
  CHECK(key_of([] { ModelSpec::custom([](double) { return 0.0; }, [](double) { return 1.0; }, 0, 1, 2); }) ==
        "x0");
}

TEST_CASE("same_as and with_x0") {
  const auto a = ModelSpec::cir(1, 1, 1, 1);
  CHECK(a.same_as(ModelSpec::cir(1, 1, 1, 1)));
  CHECK_FALSE(a.same_as(ModelSpec::cir(1, 1, 1, 2)));
  CHECK_FALSE(a.same_as(ModelSpec::cir(1, 2, 1, 1)));
  CHECK(a.with_x0(3.0).x0() == 3.0);
  CHECK_THROWS_AS(a.with_x0(-1.0), ValidationError);
}
