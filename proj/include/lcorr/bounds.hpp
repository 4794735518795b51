#pragma once

#include "lcorr/decomp.hpp"
#include "lcorr/fields.hpp"

namespace lcorr {

// Functions bounding the C1 increment of one corrugation step. All three are
// evaluated with phi - 1 summed directly so that small alpha does not cancel.

/// psi(a) = (sqrt(2 cosh(a)^2 - 2 phi(a)) + sinh(a)) / sqrt(phi(a)^2 - 1).
/// Returns the limit sqrt3 + sqrt2 for a < 1e-4.
double psi(double alpha);
/// (cosh(a)^2 - phi(a)) / (phi(a)^2 - 1); tends to 3/2 at 0.
double psi1(double alpha);
/// sinh(a)^2 / (phi(a)^2 - 1); tends to 2 at 0.
double psi2(double alpha);

inline constexpr double kPsi1Limit = 1.5;
inline constexpr double kPsi2Limit = 2.0;
double psi_limit();

struct MSampling {
  int samples = 4096;
  double inflation = 1.01;
};

/// sup of psi over (0, alpha_max] from dense sampling (half the samples
/// log-spaced near 0) together with the limit value, times the inflation.
double M_constant(double alpha_max, const MSampling& sampling = {});

/// 2 cosh(alpha_max) + 1.
double K_constant(double alpha_max);
/// 2^k K^k.
double K_tilde(double alpha_max, int k);

/// Smallest c with sum_j sqrt(eta_j) |dl_j|_g <= c |sum_j eta_j dl_j^2|_g^{1/2}
/// at every node of the data. Nodes with zero default are skipped.
double form_constant_c(const PrimitiveDecomposition& decomp, const MetricField& g);

/// 2 M c (sup |df0|_{g} + sup |n_{f0}|).
double T_constant(double M, double c, const EmbeddingJet& f0, const MetricField& g);

struct BoundConstants {
  double alpha_max = 0.0;
  double M = 0.0;
  double K = 0.0;
  int k = 0;
  double K_tilde = 0.0;
  double c = 0.0;
  double T = 0.0;
};

/// M, K and K_tilde for (alpha_max, k); c and T are left at zero.
BoundConstants bound_constants(double alpha_max, int k, const MSampling& sampling = {});

}  // namespace lcorr
