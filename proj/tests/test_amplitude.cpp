#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lcorr/amplitude.hpp"
#include "lcorr/errors.hpp"

using namespace lcorr;

namespace {

double i0(double a) { return std::cyl_bessel_i(0.0, a); }

// Plain bisection on the library-independent I0.
double oracle_inverse(double y) {
  double lo = 0.0, hi = 1.0;
  while (i0(hi) < y) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (i0(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Midpoint rule on the defining integral with many panels.
double oracle_integral(double a, int n = 4096) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::cosh(a * std::cos(2.0 * std::numbers::pi * (i + 0.5) / n));
  return s / n;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("phi values") {
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(1.0) == doctest::Approx(1.2660658778).epsilon(1e-10));
  CHECK(phi(2.0) == doctest::Approx(2.2795853023).epsilon(1e-10));
  for (int i = 0; i <= 100; ++i) {
    const double a = 0.1 * i;
    CHECK(std::abs(phi(a) - i0(a)) <= 1e-12 * std::max(1.0, i0(a)));
  }
  for (double a : {0.3, 1.7, 4.0}) CHECK(std::abs(phi(a) - oracle_integral(a)) <= 1e-12 * phi(a));
}

TEST_CASE("phi minus one keeps precision near zero") {
  for (double a : {1e-8, 1e-5, 1e-3}) {
    const double exact = a * a / 4.0 + a * a * a * a / 64.0;
    CHECK(phi_minus_one(a) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("phi derivatives") {
  for (double a : {0.2, 1.0, 3.0}) {
    CHECK(phi_derivative(a) == doctest::Approx(std::cyl_bessel_i(1.0, a)).epsilon(1e-12));
    CHECK(phi_second_derivative(a) ==
          doctest::Approx(0.5 * (i0(a) + std::cyl_bessel_i(2.0, a))).epsilon(1e-12));
  }
  for (int k = 0; k <= 6; ++k) CHECK(bessel_i(k, 2.5) == doctest::Approx(std::cyl_bessel_i(k, 2.5)).epsilon(1e-13));
}

TEST_CASE("trapezoid cross-check") {
  for (double a : {0.1, 0.5, 1.0, 2.0}) CHECK(std::abs(phi_trapezoid(a, 64) - phi(a)) <= 1e-12);
}

TEST_CASE("phi inverse") {
  CHECK(phi_inverse(1.0).alpha == 0.0);
  CHECK(phi_inverse(1.2660658778).alpha == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(kind_of([] { phi_inverse(0.9); }) == ErrorKind::DomainError);
  double prev = -1.0;
  for (int i = 0; i <= 60; ++i) {
    const double y = 1.0 + 0.05 * i * i;
    const auto r = phi_inverse(y);
    CHECK(std::abs(phi(r.alpha) - y) <= 1e-12 * std::max(1.0, y));
    CHECK(r.phi_value == doctest::Approx(phi(r.alpha)).epsilon(1e-15));
    CHECK(r.alpha > prev);
    CHECK(r.alpha == doctest::Approx(oracle_inverse(y)).epsilon(1e-10));
    prev = r.alpha;
  }
}

TEST_CASE("radial factor") {
  CHECK(radial_factor(0.0, 1.0) == 1.0);
  CHECK(radial_factor(0.5, 1.0) == doctest::Approx(0.7071067812));
  CHECK(kind_of([] { radial_factor(1.2, 1.0); }) == ErrorKind::NotRiemannian);
  CHECK(kind_of([] { radial_factor(1.0, 1.0); }) == ErrorKind::NotRiemannian);
}

TEST_CASE("amplitude") {
  CHECK(amplitude(1.0, 1.0) == 0.0);
  const double a = amplitude(radial_factor(0.5, 1.0), 1.0);
  CHECK(a == doctest::Approx(oracle_inverse(std::sqrt(2.0))).epsilon(1e-10));
  CHECK(a == doctest::Approx(1.2282198518).epsilon(1e-9));
  CHECK(amplitude(radial_factor(0.25, 1.0), 1.0) < a);
  CHECK(kind_of([] { amplitude(2.0, 1.0); }) == ErrorKind::DomainError);
  // eta dl(u)^2 = 1 - 1/phi(alpha)^2.
  for (double eta : {0.1, 0.3, 0.6}) {
    for (double dlu : {0.8, 1.0, 1.15}) {
      const double al = amplitude(radial_factor(eta, dlu), dlu);
      CHECK(eta * dlu * dlu == doctest::Approx(1.0 - 1.0 / (phi(al) * phi(al))).epsilon(1e-11));
    }
  }
}
