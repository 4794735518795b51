#pragma once

#include <cmath>

namespace lcorr {

/// A vector (or point) of R^{2,1}. The z axis is the timelike direction.
struct Vec3M {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3M& operator+=(const Vec3M& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3M& operator-=(const Vec3M& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3M& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr Vec3M operator+(Vec3M a, const Vec3M& b) { return a += b; }
  friend constexpr Vec3M operator-(Vec3M a, const Vec3M& b) { return a -= b; }
  friend constexpr Vec3M operator*(double s, Vec3M a) { return a *= s; }
  friend constexpr Vec3M operator*(Vec3M a, double s) { return a *= s; }
  friend constexpr Vec3M operator-(const Vec3M& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3M&, const Vec3M&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// h(a, b) = a.x b.x + a.y b.y - a.z b.z
constexpr double minkowski_inner(const Vec3M& a, const Vec3M& b) {
  return a.x * b.x + a.y * b.y - a.z * b.z;
}

/// The Euclidean reference metric used for every C0/C1 distance.
constexpr double euclidean_inner(const Vec3M& a, const Vec3M& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double euclidean_norm(const Vec3M& a) { return std::sqrt(euclidean_inner(a, a)); }

constexpr Vec3M cross(const Vec3M& a, const Vec3M& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Smallest eigenvalue the h-Gram matrix of a tangent pair may have before the
/// plane is treated as degenerate.
inline constexpr double kSpacelikeThreshold = 1e-10;

/// Future-pointing (z > 0) unit timelike vector h-orthogonal to span(t1, t2).
/// Throws Error{DegeneratePlane} when the pair is dependent or the plane is not
/// spacelike.
Vec3M timelike_unit_normal(const Vec3M& t1, const Vec3M& t2);

/// Exponential map of flat R^{2,1}: affine translation.
constexpr Vec3M exp_point(const Vec3M& p, const Vec3M& w) { return p + w; }

}  // namespace lcorr
