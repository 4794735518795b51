#pragma once

#include <vector>

#include "lcorr/fields.hpp"

namespace lcorr {

/// Fixed list of unit linear forms at angles (i - 1) pi / k, i = 1..k.
struct FormDictionary {
  std::vector<LinearForm> forms;
  std::vector<double> angles;

  std::size_t size() const { return forms.size(); }
};

/// Throws Error{Config} for k < 3 (fewer forms cannot span symmetric 2x2 forms).
FormDictionary build_dictionary(int k);

/// Delta = sum_j eta_j dl_j (x) dl_j with every eta_j >= 0.
struct PrimitiveDecomposition {
  Grid grid;
  std::vector<LinearForm> forms;
  std::vector<ScalarField> eta;
  /// sup-node Frobenius norm of reconstruct(*this) - input.
  double residual = 0.0;
};

inline constexpr double kDecompositionTolerance = 1e-9;

/// Coefficients for one node. k = 3 uses the closed-form inverse of the
/// 0/60/120 degree system; larger dictionaries take the minimum-norm solution
/// when it is nonnegative and fall back to active-set NNLS otherwise.
/// Throws Error{NotPSD} or Error{ConeViolation}.
std::vector<double> decompose_node(const Sym2& delta, const FormDictionary& dict);

PrimitiveDecomposition decompose(const MetricField& delta, const FormDictionary& dict);

/// Node-wise sum_j eta_j dl_j (x) dl_j. An empty decomposition gives the zero field.
MetricField reconstruct(const PrimitiveDecomposition& decomp);

/// Largest coefficient difference between grid neighbours, over all forms.
double max_coefficient_jump(const PrimitiveDecomposition& decomp);

/// Lawson-Hanson active-set solve of min |A x - b|_2 subject to x >= 0, for a
/// column-major 3 x k matrix. Pivots are taken in ascending column order on ties.
std::vector<double> nnls(const std::vector<double>& A, int cols, const double b[3]);

}  // namespace lcorr
