#include "lcorr/lorentz.hpp"

#include <algorithm>
#include <sstream>

#include "lcorr/errors.hpp"

namespace lcorr {

Vec3M timelike_unit_normal(const Vec3M& t1, const Vec3M& t2) {
  const double a = minkowski_inner(t1, t1);
  const double b = minkowski_inner(t1, t2);
  const double c = minkowski_inner(t2, t2);
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  const double lambda_min = mean - rad;
  if (!(lambda_min >= kSpacelikeThreshold)) {
    std::ostringstream os;
    os << "tangent pair does not span a spacelike plane (min Gram eigenvalue " << lambda_min << ")";
    throw Error(ErrorKind::DegeneratePlane, os.str());
  }

  // J (t1 x t2) with J = diag(1,1,-1) is h-orthogonal to both tangents.
  const Vec3M c12 = cross(t1, t2);
  Vec3M n{c12.x, c12.y, -c12.z};
  const double nn = minkowski_inner(n, n);
  if (!(nn < 0.0)) {
    throw Error(ErrorKind::DegeneratePlane, "normal is not timelike");
  }
  n *= 1.0 / std::sqrt(-nn);
  if (n.z < 0.0) n = -n;
  return n;
}

}  // namespace lcorr
