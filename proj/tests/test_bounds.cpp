#include <doctest.h>

#include <cmath>

#include "lcorr/amplitude.hpp"
#include "lcorr/bounds.hpp"
#include "lcorr/decomp.hpp"

using namespace lcorr;

namespace {

// psi written directly from cosh, sinh and the library-independent I0.
double oracle_psi(double a) {
  const double p = std::cyl_bessel_i(0.0, a);
  const double ch = std::cosh(a);
  return (std::sqrt(2.0 * ch * ch - 2.0 * p) + std::sinh(a)) / std::sqrt(p * p - 1.0);
}

double oracle_sup_psi(double amax, int n = 20000) {
  double s = 0.0;
  for (int i = 1; i <= n; ++i) s = std::max(s, oracle_psi(amax * i / n));
  return s;
}

}  // namespace

TEST_CASE("psi values") {
  CHECK(psi(1.0) == doctest::Approx(oracle_psi(1.0)).epsilon(1e-12));
  CHECK(psi(1.0) == doctest::Approx(3.4368).epsilon(1e-4));
  CHECK(std::abs(psi(1e-3) - (std::sqrt(3.0) + std::sqrt(2.0))) <= 1e-2);
  CHECK(psi_limit() == doctest::Approx(std::sqrt(3.0) + std::sqrt(2.0)));
  for (int i = 1; i <= 100; ++i) {
    const double v = psi(0.1 * i);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("psi1 and psi2 near zero and the identity") {
  CHECK(std::abs(psi2(1e-3) - 2.0) <= 1e-3);
  CHECK(std::abs(psi1(1e-3) - 1.5) <= 5e-3);
  for (double a : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(psi(a) - (std::sqrt(2.0 * psi1(a)) + std::sqrt(psi2(a)))) <= 1e-10);
  }
  // Small arguments stay close to their limits instead of cancelling.
  for (double a : {1e-6, 1e-5, 1e-4}) {
    CHECK(psi1(a) == doctest::Approx(kPsi1Limit).epsilon(1e-4));
    CHECK(psi2(a) == doctest::Approx(kPsi2Limit).epsilon(1e-4));
  }
}

TEST_CASE("M constant") {
  CHECK(M_constant(1.0) == doctest::Approx(1.01 * oracle_sup_psi(1.0)).epsilon(1e-6));
  CHECK(M_constant(1.0) == doctest::Approx(3.44 * 1.01).epsilon(2e-3));
  CHECK(std::abs(M_constant(0.1) / psi_limit() - 1.0) <= 0.02);
  CHECK(M_constant(2.0) >= M_constant(1.0));
  CHECK(M_constant(0.0) == doctest::Approx(1.01 * psi_limit()));
  // The defining inequality with M in place of psi.
  const double M = M_constant(1.5);
  for (int i = 1; i <= 1000; ++i) {
    const double a = 1.5 * i / 1000.0;
    const double p = phi(a);
    const double lhs = (std::sqrt(2.0 * std::cosh(a) * std::cosh(a) - 2.0 * p) + std::sinh(a)) / p;
    CHECK(lhs <= M * std::sqrt(1.0 - 1.0 / (p * p)));
  }
}

TEST_CASE("K and K tilde") {
  CHECK(K_constant(0.0) == 3.0);
  CHECK(K_tilde(0.0, 3) == doctest::Approx(216.0));
  CHECK(K_constant(1.0) == doctest::Approx(4.08616).epsilon(1e-5));
  const auto c = bound_constants(1.0, 5);
  CHECK(c.K_tilde == doctest::Approx(std::pow(2.0 * c.K, 5)));
  CHECK(c.c == 0.0);
  CHECK(c.T == 0.0);
}

TEST_CASE("form constant c") {
  const Grid g(5);
  const auto I = constant_metric(g, Sym2::identity());

  PrimitiveDecomposition single;
  single.grid = g;
  single.forms = {{1.0, 0.0}};
  single.eta = {ScalarField(g, 0.7)};
  CHECK(form_constant_c(single, I) == doctest::Approx(1.0));

  PrimitiveDecomposition zero = single;
  zero.eta = {ScalarField(g, 0.0)};
  CHECK(form_constant_c(zero, I) == 0.0);

  const auto dec = decompose(I, build_dictionary(3));
  const double c = form_constant_c(dec, I);
  // Three coefficients of 2/3 against |I|^{1/2} = 1. Cauchy-Schwarz gives
  // sum sqrt(eta_j) |dl_j| <= sqrt(k tr_g Delta) and tr_g I = 2, so the
  // operator-norm ratio is bounded by sqrt(2k) = sqrt(6), attained here.
  CHECK(c == doctest::Approx(3.0 * std::sqrt(2.0 / 3.0)));
  CHECK(c <= std::sqrt(6.0) + 1e-12);
}

TEST_CASE("T constant") {
  const Grid g(5);
  const auto f0 = EmbeddingJet::flat_inclusion(g);
  const auto I = constant_metric(g, Sym2::identity());
  CHECK(T_constant(3.5, 1.2, f0, I) == doctest::Approx(4.0 * 3.5 * 1.2));
  CHECK(T_constant(0.0, 1.2, f0, I) == 0.0);
  CHECK(T_constant(3.5, 0.0, f0, I) == 0.0);
  CHECK(sup_differential_norm(f0, 0.25 * I) == doctest::Approx(2.0));
  CHECK(T_constant(3.5, 1.2, f0, 0.25 * I) == doctest::Approx(2.0 * 3.5 * 1.2 * 3.0));
}
