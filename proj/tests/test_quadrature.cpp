#include <cmath>

#include <doctest.h>

#include "scalemix/quadrature.hpp"

using scalemix::integrate;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials are exact") {
  auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  auto r2 = integrate([](double x) { return 3.0 * x * x - 2.0 * x + 1.0; }, -2.0, 5.0);
  CHECK(r2.value == doctest::Approx(133.0 - 21.0 + 7.0).epsilon(1e-14));
}

TEST_CASE("gaussian mass") {
  auto r = integrate(
      [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); },
      -40.0, 40.0, 1e-13);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("narrow spike is resolved") {
  const double sd = 1e-3;
  auto f = [sd](double x) {
    const double z = (x - 0.4321) / sd;
    return std::exp(-0.5 * z * z);
  };
  auto r = integrate(f, 0.0, 1.0, 1e-10);
  CHECK(r.value == doctest::Approx(sd * std::sqrt(2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("integrable endpoint singularity") {
  auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                     1e-10, 0.0, 20000);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("empty interval") {
  auto r = integrate([](double x) { return x; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
}

TEST_CASE("error estimate bounds the true error") {
  auto f = [](double x) { return std::sin(10.0 * x) * std::exp(-x); };
  auto r = integrate(f, 0.0, 3.0, 1e-12);
  const double exact =
      (10.0 - std::exp(-3.0) * (std::sin(30.0) + 10.0 * std::cos(30.0))) / 101.0;
  CHECK(std::abs(r.value - exact) <= std::max(r.error, 1e-13));
}

}  // TEST_SUITE
