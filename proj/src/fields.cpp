#include "lcorr/fields.hpp"

#include <algorithm>
#include <sstream>

#include "lcorr/errors.hpp"
#include "lcorr/parallel.hpp"

namespace lcorr {
namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    std::ostringstream os;
    os << "grid " << a.nx() << "x" << a.ny() << " vs " << b.nx() << "x" << b.ny();
    throw Error(ErrorKind::GridMismatch, os.str());
  }
}

// Inverse of a positive definite 2x2 form; throws SingularMetric otherwise.
Sym2 inverse(const Sym2& g) {
  const double d = g.det();
  if (!(d > 0.0) || !(g.E > 0.0)) {
    std::ostringstream os;
    os << "metric (" << g.E << ", " << g.F << ", " << g.G << ") is not positive definite";
    throw Error(ErrorKind::SingularMetric, os.str());
  }
  return {g.G / d, -g.F / d, g.E / d};
}

// Largest eigenvalue of the pencil (B, g) with B positive semidefinite.
double largest_generalized_eigenvalue(const Sym2& B, const Sym2& g) {
  // det(B - l g) = det(g) l^2 - (B.E g.G + B.G g.E - 2 B.F g.F) l + det(B)
  const double a = g.det();
  const double b = B.E * g.G + B.G * g.E - 2.0 * B.F * g.F;
  const double c = B.det();
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  return (b + std::sqrt(disc)) / (2.0 * a);
}

template <class T, class Op>
Field<T> zip(const Field<T>& a, const Field<T>& b, Op op) {
  require_same_grid(a.grid, b.grid);
  Field<T> out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = op(a[k], b[k]);
  return out;
}

}  // namespace

Grid::Grid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 3 || ny < 3) {
    std::ostringstream os;
    os << "grid needs at least 3 nodes per axis, got " << nx << "x" << ny;
    throw Error(ErrorKind::Config, os.str());
  }
}

LinearForm LinearForm::normalized(double a, double b) {
  const double len = std::hypot(a, b);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorKind::DomainError, "linear form must be nonzero");
  }
  return {a / len, b / len};
}

EmbeddingJet EmbeddingJet::sample(const Grid& g, const PointFn& f, const PointFn& fx,
                                  const PointFn& fy) {
  EmbeddingJet jet(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x(i);
      const double y = g.y(j);
      const auto k = g.index(i, j);
      jet.position[k] = f(x, y);
      jet.differential[k] = {fx(x, y), fy(x, y)};
    }
  }
  return jet;
}

EmbeddingJet EmbeddingJet::flat_inclusion(const Grid& g) {
  return sample(
      g, [](double x, double y) { return Vec3M{x, y, 0.0}; },
      [](double, double) { return Vec3M{1.0, 0.0, 0.0}; },
      [](double, double) { return Vec3M{0.0, 1.0, 0.0}; });
}

MetricField operator+(const MetricField& a, const MetricField& b) {
  return zip(a, b, [](const Sym2& p, const Sym2& q) { return p + q; });
}

MetricField operator-(const MetricField& a, const MetricField& b) {
  return zip(a, b, [](const Sym2& p, const Sym2& q) { return p - q; });
}

MetricField operator*(double s, const MetricField& a) {
  MetricField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
  return out;
}

MetricField constant_metric(const Grid& g, const Sym2& value) { return MetricField(g, value); }

Sym2 pullback(const Jacobian& df) {
  return {minkowski_inner(df.dx, df.dx), minkowski_inner(df.dx, df.dy),
          minkowski_inner(df.dy, df.dy)};
}

MetricField pullback_metric(const EmbeddingJet& f) {
  MetricField out(f.grid);
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) out[k] = pullback(f.differential[k]);
  });
  return out;
}

Sym2 clamp_psd(const Sym2& m) {
  const double lo = m.min_eigenvalue();
  if (lo >= 0.0) return m;
  // Remove the negative eigencomponent: m - lo * w w^T with w the unit eigenvector.
  double wx = m.F;
  double wy = lo - m.E;
  if (std::hypot(wx, wy) == 0.0) {
    wx = lo - m.G;
    wy = m.F;
  }
  const double len = std::hypot(wx, wy);
  if (len == 0.0) return {m.E - lo, m.F, m.G - lo};
  wx /= len;
  wy /= len;
  return {m.E - lo * wx * wx, m.F - lo * wx * wy, m.G - lo * wy * wy};
}

MetricField isometric_default(const MetricField& induced, const MetricField& target, double tol) {
  MetricField out = induced - target;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double lo = out[k].min_eigenvalue();
    if (lo < -tol) {
      std::ostringstream os;
      os << "isometric default has eigenvalue " << lo << " at node (" << out.grid.col(k) << ", "
         << out.grid.row(k) << ")";
      throw Error(ErrorKind::NotLong, os.str());
    }
    out[k] = clamp_psd(out[k]);
  }
  return out;
}

bool is_psd(const MetricField& m, double tol) {
  return std::all_of(m.values.begin(), m.values.end(),
                     [tol](const Sym2& s) { return s.min_eigenvalue() >= -tol; });
}

double operator_norm_map(const Jacobian& A, const Sym2& g) {
  inverse(g);
  const Sym2 gram{euclidean_inner(A.dx, A.dx), euclidean_inner(A.dx, A.dy),
                  euclidean_inner(A.dy, A.dy)};
  return std::sqrt(std::max(0.0, largest_generalized_eigenvalue(gram, g)));
}

double operator_norm_form(const Sym2& B, const Sym2& g) {
  // Eigenvalues of g^{-1} B; for symmetric B they are real.
  const Sym2 gi = inverse(g);
  const double m11 = gi.E * B.E + gi.F * B.F;
  const double m12 = gi.E * B.F + gi.F * B.G;
  const double m21 = gi.F * B.E + gi.G * B.F;
  const double m22 = gi.F * B.F + gi.G * B.G;
  const double tr = m11 + m22;
  const double det = m11 * m22 - m12 * m21;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return std::max(std::abs(0.5 * tr + disc), std::abs(0.5 * tr - disc));
}

double operator_norm_form(const MetricField& B, const MetricField& g) {
  require_same_grid(B.grid, g.grid);
  double sup = 0.0;
  for (std::size_t k = 0; k < B.size(); ++k) sup = std::max(sup, operator_norm_form(B[k], g[k]));
  return sup;
}

double operator_norm_covector(double a, double b, const Sym2& g) {
  const Sym2 gi = inverse(g);
  return std::sqrt(std::max(0.0, gi(a, b, a, b)));
}

double c0_distance(const EmbeddingJet& f1, const EmbeddingJet& f2) {
  require_same_grid(f1.grid, f2.grid);
  double sup = 0.0;
  for (std::size_t k = 0; k < f1.position.size(); ++k) {
    sup = std::max(sup, euclidean_norm(f2.position[k] - f1.position[k]));
  }
  return sup;
}

double c1_increment(const EmbeddingJet& f1, const EmbeddingJet& f2, const MetricField& g) {
  require_same_grid(f1.grid, f2.grid);
  require_same_grid(f1.grid, g.grid);
  double sup = 0.0;
  for (std::size_t k = 0; k < f1.differential.size(); ++k) {
    sup = std::max(sup, operator_norm_map(f2.differential[k] - f1.differential[k], g[k]));
  }
  return sup;
}

double sup_normal_norm(const EmbeddingJet& f) {
  double sup = 0.0;
  for (const auto& d : f.differential) {
    sup = std::max(sup, euclidean_norm(timelike_unit_normal(d.dx, d.dy)));
  }
  return sup;
}

double sup_differential_norm(const EmbeddingJet& f, const MetricField& g) {
  require_same_grid(f.grid, g.grid);
  double sup = 0.0;
  for (std::size_t k = 0; k < f.differential.size(); ++k) {
    sup = std::max(sup, operator_norm_map(f.differential[k], g[k]));
  }
  return sup;
}

bool is_spacelike(const EmbeddingJet& f) {
  return std::all_of(f.differential.begin(), f.differential.end(), [](const Jacobian& d) {
    const Sym2 m = pullback(d);
    return d.dx.finite() && d.dy.finite() && m.min_eigenvalue() >= kSpacelikeThreshold;
  });
}

FrameNode corrugation_frame(const Jacobian& df, const LinearForm& ell) {
  const Sym2 m = pullback(df);
  const Sym2 mi = inverse(m);
  FrameNode fr;

  // v spans ker dl.
  const double kx = -ell.b;
  const double ky = ell.a;
  const double kn = std::sqrt(m(kx, ky, kx, ky));
  fr.v[0] = kx / kn;
  fr.v[1] = ky / kn;

  // u is the normalized m-gradient of l: m-orthogonal to ker dl, dl(u) > 0.
  const double gx = mi.E * ell.a + mi.F * ell.b;
  const double gy = mi.F * ell.a + mi.G * ell.b;
  const double gn = std::sqrt(ell.a * gx + ell.b * gy);
  fr.u[0] = gx / gn;
  fr.u[1] = gy / gn;
  fr.dl_u = gn;

  fr.vhat = df.apply(fr.v[0], fr.v[1]);
  fr.t = df.apply(fr.u[0], fr.u[1]);
  fr.n = timelike_unit_normal(fr.vhat, fr.t);
  return fr;
}

std::vector<FrameNode> corrugation_frame(const EmbeddingJet& f, const LinearForm& ell) {
  std::vector<FrameNode> out(f.grid.size());
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) out[k] = corrugation_frame(f.differential[k], ell);
  });
  return out;
}

DifferentialConsistency differential_consistency(const EmbeddingJet& f) {
  const Grid& g = f.grid;
  auto diff = [&](int i, int j, bool along_x) {
    const int n = along_x ? g.nx() : g.ny();
    const double h = along_x ? g.hx() : g.hy();
    const int c = along_x ? i : j;
    auto at = [&](int s) {
      return along_x ? f.position[g.index(s, j)] : f.position[g.index(i, s)];
    };
    if (c == 0) return (1.0 / (2.0 * h)) * (-3.0 * at(0) + 4.0 * at(1) - at(2));
    if (c == n - 1) return (1.0 / (2.0 * h)) * (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3));
    return (1.0 / (2.0 * h)) * (at(c + 1) - at(c - 1));
  };
  DifferentialConsistency out;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto& d = f.differential[g.index(i, j)];
      out.max_abs = std::max(out.max_abs, euclidean_norm(diff(i, j, true) - d.dx));
      out.max_abs = std::max(out.max_abs, euclidean_norm(diff(i, j, false) - d.dy));
    }
  }
  out.constant = out.max_abs / (g.hx() + g.hy());
  return out;
}

}  // namespace lcorr
