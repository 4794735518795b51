#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "lcorr/lorentz.hpp"

namespace lcorr {

/// Uniform node grid on the parameter square [0,1]^2. Nodes are stored row
/// major: index = j * nx + i with x = i * hx and y = j * hy.
class Grid {
 public:
  Grid() = default;
  /// Throws Error{Config} unless nx, ny >= 3.
  Grid(int nx, int ny);
  explicit Grid(int n) : Grid(n, n) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return 1.0 / (nx_ - 1); }
  double hy() const { return 1.0 / (ny_ - 1); }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  int col(std::size_t k) const { return static_cast<int>(k % nx_); }
  int row(std::size_t k) const { return static_cast<int>(k / nx_); }
  double x(int i) const { return i * hx(); }
  double y(int j) const { return j * hy(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
};

/// Symmetric bilinear form E dx^2 + 2F dxdy + G dy^2 on the tangent plane.
struct Sym2 {
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;

  constexpr Sym2& operator+=(const Sym2& o) {
    E += o.E; F += o.F; G += o.G;
    return *this;
  }
  constexpr Sym2& operator-=(const Sym2& o) {
    E -= o.E; F -= o.F; G -= o.G;
    return *this;
  }
  constexpr Sym2& operator*=(double s) {
    E *= s; F *= s; G *= s;
    return *this;
  }
  friend constexpr Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend constexpr Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
  friend constexpr Sym2 operator*(double s, Sym2 a) { return a *= s; }
  friend constexpr bool operator==(const Sym2&, const Sym2&) = default;

  constexpr double det() const { return E * G - F * F; }
  constexpr double operator()(double x1, double y1, double x2, double y2) const {
    return E * x1 * x2 + F * (x1 * y2 + y1 * x2) + G * y1 * y2;
  }
  double min_eigenvalue() const { return 0.5 * (E + G) - std::hypot(0.5 * (E - G), F); }
  double max_eigenvalue() const { return 0.5 * (E + G) + std::hypot(0.5 * (E - G), F); }
  double frobenius() const { return std::sqrt(E * E + 2.0 * F * F + G * G); }
  double max_abs_entry() const { return std::max({std::abs(E), std::abs(F), std::abs(G)}); }

  static constexpr Sym2 identity() { return {1.0, 0.0, 1.0}; }
};

/// Linear form l(x, y) = a x + b y on the parameter square, kept at unit
/// Euclidean length. Its differential is the corrugation direction.
struct LinearForm {
  double a = 1.0;
  double b = 0.0;

  /// Normalizes (a, b); throws Error{DomainError} for the zero form.
  static LinearForm normalized(double a, double b);
  static LinearForm from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

  double operator()(double x, double y) const { return a * x + b * y; }
  /// dl (x) dl as a symmetric form.
  Sym2 square() const { return {a * a, a * b, b * b}; }
};

/// Differential at a node: images of the coordinate vectors d/dx and d/dy.
struct Jacobian {
  Vec3M dx;
  Vec3M dy;

  Vec3M apply(double wx, double wy) const { return wx * dx + wy * dy; }
  friend Jacobian operator-(const Jacobian& a, const Jacobian& b) { return {a.dx - b.dx, a.dy - b.dy}; }
  friend bool operator==(const Jacobian&, const Jacobian&) = default;
};

template <class T>
struct Field {
  Grid grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(const Grid& g, const T& fill = T{}) : grid(g), values(g.size(), fill) {}

  T& operator[](std::size_t k) { return values[k]; }
  const T& operator[](std::size_t k) const { return values[k]; }
  std::size_t size() const { return values.size(); }
};

using ScalarField = Field<double>;
using MetricField = Field<Sym2>;

/// Grid-sampled map C -> R^{2,1} with its differential stored at every node.
struct EmbeddingJet {
  Grid grid;
  std::vector<Vec3M> position;
  std::vector<Jacobian> differential;

  EmbeddingJet() = default;
  explicit EmbeddingJet(const Grid& g) : grid(g), position(g.size()), differential(g.size()) {}

  using PointFn = std::function<Vec3M(double, double)>;
  /// Samples an analytic map and its two partial derivatives.
  static EmbeddingJet sample(const Grid& g, const PointFn& f, const PointFn& fx, const PointFn& fy);
  /// f(x, y) = (x, y, 0).
  static EmbeddingJet flat_inclusion(const Grid& g);
};

// -- Field algebra ----------------------------------------------------------

MetricField operator+(const MetricField& a, const MetricField& b);
MetricField operator-(const MetricField& a, const MetricField& b);
MetricField operator*(double s, const MetricField& a);
MetricField constant_metric(const Grid& g, const Sym2& value);

// -- Measurements -----------------------------------------------------------

/// E = h(fx, fx), F = h(fx, fy), G = h(fy, fy).
Sym2 pullback(const Jacobian& df);
MetricField pullback_metric(const EmbeddingJet& f);

/// Eigenvalues at or above -kPsdTolerance count as nonnegative (and are clamped to 0).
inline constexpr double kPsdTolerance = 1e-12;

/// Projects a form whose smallest eigenvalue lies in [-tol, 0) onto the PSD cone.
Sym2 clamp_psd(const Sym2& m);

/// induced - target; throws Error{NotLong} if some node has an eigenvalue below -tol.
MetricField isometric_default(const MetricField& induced, const MetricField& target,
                              double tol = kPsdTolerance);

/// True when every node of `m` has its smallest eigenvalue >= -tol.
bool is_psd(const MetricField& m, double tol = kPsdTolerance);

/// sup over g-unit u of |A u| in the Euclidean reference metric.
double operator_norm_map(const Jacobian& A, const Sym2& g);
/// Largest |lambda| solving det(B - lambda g) = 0.
double operator_norm_form(const Sym2& B, const Sym2& g);
double operator_norm_form(const MetricField& B, const MetricField& g);
/// sup over g-unit u of |a u_x + b u_y|.
double operator_norm_covector(double a, double b, const Sym2& g);

double c0_distance(const EmbeddingJet& f1, const EmbeddingJet& f2);
double c1_increment(const EmbeddingJet& f1, const EmbeddingJet& f2, const MetricField& g);

/// sup-node Euclidean norm of the future unit normal of f.
double sup_normal_norm(const EmbeddingJet& f);
/// sup-node operator norm of df with respect to g.
double sup_differential_norm(const EmbeddingJet& f, const MetricField& g);

/// Whether the stored differential spans a spacelike plane at every node.
bool is_spacelike(const EmbeddingJet& f);

// -- Corrugation frame --------------------------------------------------------

/// Per-node corrugation frame: (v, u) is an f*h-orthonormal basis of the
/// parameter plane with v in ker dl and dl(u) > 0; vhat = df(v), t = df(u) and n
/// is the future unit normal.
struct FrameNode {
  double v[2] = {0.0, 0.0};
  double u[2] = {0.0, 0.0};
  double dl_u = 0.0;
  Vec3M vhat;
  Vec3M t;
  Vec3M n;
};

FrameNode corrugation_frame(const Jacobian& df, const LinearForm& ell);
std::vector<FrameNode> corrugation_frame(const EmbeddingJet& f, const LinearForm& ell);

/// Compares stored differentials with second-order finite differences of the
/// stored positions. `constant` is max_abs / (hx + hy).
struct DifferentialConsistency {
  double max_abs = 0.0;
  double constant = 0.0;
};
DifferentialConsistency differential_consistency(const EmbeddingJet& f);

}  // namespace lcorr
