#pragma once

#include <vector>

namespace lcorr {

/// Modified Bessel function of the first kind I_k(x), x >= 0, by its power
/// series sum_m (x/2)^(2m+k) / (m! (m+k)!). All terms are positive, so the
/// partial sums lose no precision to cancellation.
double bessel_i(int order, double x);

/// I_0(x), ..., I_K(x) where K is the first order with I_K(x) < 1e-18 I_0(x)
/// (at least 2, at most max_order).
std::vector<double> bessel_i_sequence(double x, int max_order = 64);

/// phi(alpha) = int_0^1 cosh(alpha cos(2 pi s)) ds = I_0(alpha).
double phi(double alpha);
/// phi(alpha) - 1 summed without the leading 1, accurate for small alpha.
double phi_minus_one(double alpha);
/// phi'(alpha) = I_1(alpha).
double phi_derivative(double alpha);
/// phi''(alpha) = (I_0(alpha) + I_2(alpha)) / 2.
double phi_second_derivative(double alpha);
/// Periodic trapezoid rule for the defining integral; cross-check only.
double phi_trapezoid(double alpha, int samples = 64);

struct AmplitudeSolveResult {
  double alpha = 0.0;
  double phi_value = 1.0;
  int iterations = 0;
};

/// Solves phi(alpha) = y for y >= 1 (Error{DomainError} below). The root is
/// bracketed by doubling, then polished with bracket-safeguarded Newton steps
/// until |phi(alpha) - y| <= 1e-12 max(1, y); at most 200 iterations.
AmplitudeSolveResult phi_inverse(double y);

/// r = sqrt(1/dl_u^2 - eta); Error{NotRiemannian} when eta dl_u^2 >= 1.
double radial_factor(double eta, double dl_u);

/// alpha = phi^{-1}(1 / (r dl_u)); Error{DomainError} when r dl_u > 1.
double amplitude(double r, double dl_u);

}  // namespace lcorr
