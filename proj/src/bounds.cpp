#include "lcorr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcorr/amplitude.hpp"

namespace lcorr {
namespace {

struct PsiParts {
  double sinh2;    // sinh(a)^2
  double excess;   // cosh(a)^2 - phi(a) = sinh(a)^2 - (phi(a) - 1)
  double phi2m1;   // phi(a)^2 - 1
};

PsiParts psi_parts(double alpha) {
  const double pm1 = phi_minus_one(alpha);
  const double s = std::sinh(alpha);
  return {s * s, s * s - pm1, pm1 * (pm1 + 2.0)};
}

}  // namespace

double psi_limit() { return std::numbers::sqrt3 + std::numbers::sqrt2; }

double psi(double alpha) {
  if (alpha < 1e-4) return psi_limit();
  const PsiParts p = psi_parts(alpha);
  return (std::sqrt(2.0 * p.excess) + std::sinh(alpha)) / std::sqrt(p.phi2m1);
}

double psi1(double alpha) {
  if (alpha == 0.0) return kPsi1Limit;
  const PsiParts p = psi_parts(alpha);
  return p.excess / p.phi2m1;
}

double psi2(double alpha) {
  if (alpha == 0.0) return kPsi2Limit;
  const PsiParts p = psi_parts(alpha);
  return p.sinh2 / p.phi2m1;
}

double M_constant(double alpha_max, const MSampling& sampling) {
  double sup = psi_limit();
  if (alpha_max <= 0.0) return sup * sampling.inflation;
  const int half = std::max(1, sampling.samples / 2);
  const double knee = 0.01 * alpha_max;
  // Log-spaced on [1e-6 knee, knee], then uniform on [knee, alpha_max].
  for (int i = 0; i < half; ++i) {
    const double a = knee * std::pow(1e-6, 1.0 - static_cast<double>(i) / (half - 1 > 0 ? half - 1 : 1));
    sup = std::max(sup, psi(a));
  }
  const int rest = std::max(1, sampling.samples - half);
  for (int i = 1; i <= rest; ++i) {
    const double a = knee + (alpha_max - knee) * static_cast<double>(i) / rest;
    sup = std::max(sup, psi(a));
  }
  return sup * sampling.inflation;
}

double K_constant(double alpha_max) { return 2.0 * std::cosh(alpha_max) + 1.0; }

double K_tilde(double alpha_max, int k) { return std::pow(2.0 * K_constant(alpha_max), k); }

double form_constant_c(const PrimitiveDecomposition& decomp, const MetricField& g) {
  double c = 0.0;
  for (std::size_t node = 0; node < decomp.grid.size(); ++node) {
    Sym2 sum;
    double lhs = 0.0;
    for (std::size_t j = 0; j < decomp.forms.size(); ++j) {
      const double eta = decomp.eta[j][node];
      const LinearForm& ell = decomp.forms[j];
      sum += eta * ell.square();
      lhs += std::sqrt(std::max(0.0, eta)) * operator_norm_covector(ell.a, ell.b, g[node]);
    }
    const double denom = std::sqrt(operator_norm_form(sum, g[node]));
    if (denom > 0.0) c = std::max(c, lhs / denom);
  }
  return c;
}

double T_constant(double M, double c, const EmbeddingJet& f0, const MetricField& g) {
  return 2.0 * M * c * (sup_differential_norm(f0, g) + sup_normal_norm(f0));
}

BoundConstants bound_constants(double alpha_max, int k, const MSampling& sampling) {
  BoundConstants out;
  out.alpha_max = alpha_max;
  out.M = M_constant(alpha_max, sampling);
  out.K = K_constant(alpha_max);
  out.k = k;
  out.K_tilde = K_tilde(alpha_max, k);
  return out;
}

}  // namespace lcorr
