#include "lcorr/decomp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lcorr/errors.hpp"
#include "lcorr/parallel.hpp"

namespace lcorr {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Rows (E, sqrt2 F, G) make the Euclidean residual equal the Frobenius norm.
Eigen::Vector3d weighted(const Sym2& s) { return {s.E, kSqrt2 * s.F, s.G}; }

Eigen::MatrixXd system_matrix(const FormDictionary& dict) {
  Eigen::MatrixXd A(3, static_cast<Eigen::Index>(dict.size()));
  for (std::size_t j = 0; j < dict.size(); ++j) {
    A.col(static_cast<Eigen::Index>(j)) = weighted(dict.forms[j].square());
  }
  return A;
}

Sym2 combine(const FormDictionary& dict, const std::vector<double>& c) {
  Sym2 out;
  for (std::size_t j = 0; j < dict.size(); ++j) out += c[j] * dict.forms[j].square();
  return out;
}

[[noreturn]] void cone_violation(const Sym2& delta, const std::string& why) {
  std::ostringstream os;
  os.precision(17);
  os << why << " for default (" << delta.E << ", " << delta.F << ", " << delta.G
     << "); try a larger dictionary";
  throw Error(ErrorKind::ConeViolation, os.str());
}

}  // namespace

FormDictionary build_dictionary(int k) {
  if (k < 3) {
    throw Error(ErrorKind::Config, "form dictionary needs k >= 3, got " + std::to_string(k));
  }
  FormDictionary dict;
  for (int i = 0; i < k; ++i) {
    const double theta = i * std::numbers::pi / k;
    dict.angles.push_back(theta);
    dict.forms.push_back(LinearForm::from_angle(theta));
  }
  return dict;
}

std::vector<double> nnls(const std::vector<double>& A_data, int cols, const double b_data[3]) {
  const Eigen::Map<const Eigen::MatrixXd> A(A_data.data(), 3, cols);
  const Eigen::Map<const Eigen::Vector3d> b(b_data);
  const double tol = 1e-14 * std::max(1.0, b.norm());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  std::vector<bool> passive(static_cast<std::size_t>(cols), false);

  auto solve_passive = [&]() {
    std::vector<int> idx;
    for (int j = 0; j < cols; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Eigen::MatrixXd sub(3, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p) sub.col(static_cast<Eigen::Index>(p)) = A.col(idx[p]);
    const Eigen::VectorXd zs = sub.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(cols);
    for (std::size_t p = 0; p < idx.size(); ++p) z[idx[p]] = zs[static_cast<Eigen::Index>(p)];
    return z;
  };

  for (int outer = 0; outer < 3 * cols + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    int best = -1;
    double best_w = tol;
    for (int j = 0; j < cols; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best = j;
        best_w = w[j];
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < 3 * cols + 10; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      double step = 1.0;
      for (int j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          feasible = false;
          step = std::min(step, x[j] / (x[j] - z[j]));
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      x += step * (z - x);
      for (int j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return {x.data(), x.data() + cols};
}

std::vector<double> decompose_node(const Sym2& delta, const FormDictionary& dict) {
  if (dict.size() < 3) throw Error(ErrorKind::Config, "dictionary has fewer than 3 forms");
  if (delta.min_eigenvalue() < -kPsdTolerance) {
    std::ostringstream os;
    os << "default (" << delta.E << ", " << delta.F << ", " << delta.G
       << ") is not positive semi-definite";
    throw Error(ErrorKind::NotPSD, os.str());
  }

  std::vector<double> c;
  if (dict.size() == 3) {
    // Forms at 0, 60, 120 degrees: E = c1 + (c2 + c3)/4, F = sqrt3 (c2 - c3)/4,
    // G = 3 (c2 + c3)/4.
    const double sum23 = 4.0 * delta.G / 3.0;
    const double diff23 = 4.0 * delta.F / std::numbers::sqrt3;
    c = {delta.E - delta.G / 3.0, 0.5 * (sum23 + diff23), 0.5 * (sum23 - diff23)};
    for (double& v : c) {
      if (v < -kPsdTolerance) cone_violation(delta, "no nonnegative 3-form solution");
      v = std::max(v, 0.0);
    }
    return c;
  }

  const Eigen::MatrixXd A = system_matrix(dict);
  const Eigen::Vector3d d = weighted(delta);
  // Minimum-norm solution A^T (A A^T)^{-1} d: linear in the default, hence smooth.
  const Eigen::VectorXd mn = A.transpose() * (A * A.transpose()).ldlt().solve(d);
  if (mn.minCoeff() >= -kPsdTolerance) {
    c.assign(mn.data(), mn.data() + mn.size());
    for (double& v : c) v = std::max(v, 0.0);
  } else {
    const std::vector<double> a(A.data(), A.data() + A.size());
    c = nnls(a, static_cast<int>(dict.size()), d.data());
  }
  if ((combine(dict, c) - delta).frobenius() > kDecompositionTolerance) {
    cone_violation(delta, "default lies outside the dictionary cone");
  }
  return c;
}

PrimitiveDecomposition decompose(const MetricField& delta, const FormDictionary& dict) {
  PrimitiveDecomposition out;
  out.grid = delta.grid;
  out.forms = dict.forms;
  out.eta.assign(dict.size(), ScalarField(delta.grid));

  // Serial validation pass keeps the reported failing node deterministic.
  for (std::size_t k = 0; k < delta.size(); ++k) {
    if (delta[k].min_eigenvalue() < -kPsdTolerance) {
      std::ostringstream os;
      os << "default not PSD at node (" << delta.grid.col(k) << ", " << delta.grid.row(k) << ")";
      throw Error(ErrorKind::NotPSD, os.str());
    }
  }
  std::vector<std::vector<double>> coeffs(delta.size());
  std::vector<std::string> failures(delta.size());
  parallel_for(delta.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        coeffs[k] = decompose_node(delta[k], dict);
      } catch (const Error& err) {
        failures[k] = err.what();
      }
    }
  });
  for (std::size_t k = 0; k < delta.size(); ++k) {
    if (!failures[k].empty()) {
      std::ostringstream os;
      os << "node (" << delta.grid.col(k) << ", " << delta.grid.row(k) << "): " << failures[k];
      throw Error(ErrorKind::ConeViolation, os.str());
    }
    for (std::size_t j = 0; j < dict.size(); ++j) out.eta[j][k] = coeffs[k][j];
  }

  const MetricField back = reconstruct(out);
  for (std::size_t k = 0; k < delta.size(); ++k) {
    out.residual = std::max(out.residual, (back[k] - delta[k]).frobenius());
  }
  if (out.residual > kDecompositionTolerance) {
    std::ostringstream os;
    os << "reconstruction residual " << out.residual << " exceeds " << kDecompositionTolerance;
    throw Error(ErrorKind::ConeViolation, os.str());
  }
  return out;
}

MetricField reconstruct(const PrimitiveDecomposition& decomp) {
  MetricField out(decomp.grid);
  for (std::size_t j = 0; j < decomp.forms.size(); ++j) {
    const Sym2 sq = decomp.forms[j].square();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += decomp.eta[j][k] * sq;
  }
  return out;
}

double max_coefficient_jump(const PrimitiveDecomposition& decomp) {
  const Grid& g = decomp.grid;
  double jump = 0.0;
  for (const auto& eta : decomp.eta) {
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const double v = eta[g.index(i, j)];
        if (i + 1 < g.nx()) jump = std::max(jump, std::abs(eta[g.index(i + 1, j)] - v));
        if (j + 1 < g.ny()) jump = std::max(jump, std::abs(eta[g.index(i, j + 1)] - v));
      }
    }
  }
  return jump;
}

}  // namespace lcorr
