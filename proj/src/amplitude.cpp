#include "lcorr/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lcorr/errors.hpp"

namespace lcorr {

double bessel_i(int order, double x) {
  if (order < 0) order = -order;
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  const double q = half * half;
  // Leading term (x/2)^k / k!.
  double term = 1.0;
  for (int k = 1; k <= order; ++k) term *= half / k;
  double sum = term;
  for (int m = 1; m < 1000; ++m) {
    term *= q / (static_cast<double>(m) * (m + order));
    sum += term;
    if (term <= sum * 1e-17) break;
  }
  return sum;
}

std::vector<double> bessel_i_sequence(double x, int max_order) {
  std::vector<double> out;
  out.push_back(bessel_i(0, x));
  for (int k = 1; k <= max_order; ++k) {
    const double v = bessel_i(k, x);
    out.push_back(v);
    if (k >= 2 && v < 1e-18 * out.front()) break;
  }
  return out;
}

double phi(double alpha) { return bessel_i(0, alpha); }

double phi_minus_one(double alpha) {
  const double q = 0.25 * alpha * alpha;
  double term = 1.0;
  double sum = 0.0;
  for (int m = 1; m < 1000; ++m) {
    term *= q / (static_cast<double>(m) * m);
    sum += term;
    if (term <= sum * 1e-17) break;
  }
  return sum;
}

double phi_derivative(double alpha) { return bessel_i(1, alpha); }

double phi_second_derivative(double alpha) {
  return 0.5 * (bessel_i(0, alpha) + bessel_i(2, alpha));
}

double phi_trapezoid(double alpha, int samples) {
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    sum += std::cosh(alpha * std::cos(2.0 * std::numbers::pi * i / samples));
  }
  return sum / samples;
}

AmplitudeSolveResult phi_inverse(double y) {
  if (!(y >= 1.0) || !std::isfinite(y)) {
    std::ostringstream os;
    os << "phi^{-1} needs y >= 1, got " << y;
    throw Error(ErrorKind::DomainError, os.str());
  }
  AmplitudeSolveResult res;
  if (y == 1.0) return res;

  const double tol = 1e-12 * std::max(1.0, y);
  double lo = 0.0;
  double hi = 1.0;
  while (phi(hi) < y) {
    lo = hi;
    hi *= 2.0;
    ++res.iterations;
  }
  // Near zero phi(a) ~ 1 + a^2/4 gives a good start.
  double a = std::clamp(2.0 * std::sqrt(y - 1.0), lo, hi);
  double value = phi(a);
  for (; res.iterations < 200; ++res.iterations) {
    const double residual = value - y;
    if (std::abs(residual) <= tol) break;
    if (residual < 0.0) {
      lo = a;
    } else {
      hi = a;
    }
    const double slope = phi_derivative(a);
    double next = slope > 0.0 ? a - residual / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == a) break;
    a = next;
    value = phi(a);
  }
  res.alpha = a;
  res.phi_value = value;
  return res;
}

double radial_factor(double eta, double dl_u) {
  const double x = eta * dl_u * dl_u;
  if (!(x < 1.0)) {
    std::ostringstream os;
    os << "primitive metric is not Riemannian: eta dl(u)^2 = " << x;
    throw Error(ErrorKind::NotRiemannian, os.str());
  }
  if (eta == 0.0) return 1.0 / dl_u;
  return std::sqrt(1.0 / (dl_u * dl_u) - eta);
}

double amplitude(double r, double dl_u) {
  const double rd = r * dl_u;
  if (rd > 1.0 + 1e-12 || !(rd > 0.0)) {
    std::ostringstream os;
    os << "amplitude needs 0 < r dl(u) <= 1, got " << rd;
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (rd >= 1.0) return 0.0;
  return phi_inverse(1.0 / rd).alpha;
}

}  // namespace lcorr
