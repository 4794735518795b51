#pragma once

#include <limits>
#include <vector>

#include "lcorr/bounds.hpp"
#include "lcorr/decomp.hpp"
#include "lcorr/fields.hpp"

namespace lcorr {

/// How the loop primitive Gamma(p, s) = int_0^s (gamma(p, t) - mean) dt is
/// evaluated. The Bessel rule integrates the Jacobi-Anger expansion of
/// cosh/sinh(alpha cos 2 pi s) term by term; the trapezoid rule uses
/// `samples_per_period` panels per unit of s.
enum class Quadrature { BesselSeries, Trapezoid };

struct QuadratureOptions {
  Quadrature rule = Quadrature::BesselSeries;
  int samples_per_period = 64;
};

/// mu = f*h - eta dl (x) dl.
struct PrimitiveMetric {
  ScalarField eta;
  LinearForm ell;
};

MetricField primitive_target(const EmbeddingJet& f, const PrimitiveMetric& mu);

/// Loop family data at one node: gamma(s) = r (cosh(th) t + sinh(th) n) with
/// th = alpha cos(2 pi s). A node with eta == 0 is idle: alpha = 0, r = 1/dl(u)
/// and its primitive vanishes identically.
struct LoopNode {
  double eta = 0.0;
  double r = 0.0;
  double alpha = 0.0;
  double phi = 1.0;
  FrameNode frame;
  /// I_0(alpha), I_1(alpha), ... up to negligible order.
  std::vector<double> bessel;

  bool idle() const { return eta == 0.0; }
  double dl_u() const { return frame.dl_u; }
  double theta(double s) const;

  Vec3M gamma(double s) const;
  /// r phi(alpha) t, the exact mean of gamma over one period.
  Vec3M average() const;
  /// Gamma(s) for any real s, using 1-periodicity.
  Vec3M primitive(double s, const QuadratureOptions& q = {}) const;
  /// Gamma(s) integrated over the whole of [0, s], period by period, with
  /// composite Gauss-Legendre panels. Independent of the reduction above.
  Vec3M primitive_unreduced(double s, int samples_per_period) const;
  /// sinh(th) t + cosh(th) n: the boost of n that is h-orthogonal to
  /// cosh(th) t + sinh(th) n, hence the unit normal to the image of L.
  Vec3M normal_L(double s) const;
};

/// Frame, radial factor and amplitude at one node. Throws NotRiemannian when
/// eta dl(u)^2 >= 1 and DegeneratePlane when df is not spacelike.
LoopNode make_loop_node(const Jacobian& df, double eta, const LinearForm& ell);

Vec3M loop_gamma(const LoopNode& node, double s);
Vec3M loop_average(const LoopNode& node);

/// L = df + (gamma(s) - t/dl(u)) (x) dl, with s the corrugation phase.
Jacobian target_differential(const Jacobian& df, const LoopNode& node, const LinearForm& ell,
                             double s);

struct StepParams {
  LinearForm ell;
  int N = 1;
  std::vector<LoopNode> nodes;
  /// Reduced phases frac(N l(p)).
  std::vector<double> phase;
  double alpha_max = 0.0;
  double eta_max = 0.0;
};

StepParams prepare_step(const EmbeddingJet& f, const PrimitiveMetric& mu, int N);
std::vector<Jacobian> target_differential(const EmbeddingJet& f, const StepParams& params);

struct StepOptions {
  QuadratureOptions quadrature;
  /// Metric g used for the reported default and C1 shift; mu when null.
  const MetricField* norm_metric = nullptr;
  MSampling m_sampling;
  bool audit = true;
};

/// Per-step diagnostics. Bound margins are rhs - lhs minimised over nodes, so
/// a nonnegative margin means the inequality held everywhere.
struct CorrugationStepRecord {
  LinearForm ell;
  int N = 0;
  double alpha_max = 0.0;
  double eta_max = 0.0;
  double measured_sup_default = 0.0;
  double c0_shift = 0.0;
  double c1_shift = 0.0;

  double identity_residual = 0.0;
  double average_residual = 0.0;
  double normal_L_residual = 0.0;
  double normal_F_residual = 0.0;
  double normal_F_tangency = 0.0;
  /// sup N |h(n_L, dF(w))| over w in {u, v}.
  double normal_L_tangency_scaled = 0.0;

  double M = 0.0;
  double K = 0.0;
  double increment_margin = std::numeric_limits<double>::infinity();
  double increment_norm_margin = std::numeric_limits<double>::infinity();
  double growth_dF_margin = std::numeric_limits<double>::infinity();
  double growth_normal_margin = std::numeric_limits<double>::infinity();
  /// sup of the O(1/N) slack |(dF - L)(u)| allowed in the increment audit.
  double increment_slack = 0.0;
  double fd_consistency = 0.0;

  bool increment_bound_pass() const { return increment_margin >= 0.0 && increment_norm_margin >= 0.0; }
  bool growth_bound_pass() const { return growth_dF_margin >= 0.0 && growth_normal_margin >= 0.0; }
};

struct StepResult {
  EmbeddingJet jet;
  CorrugationStepRecord record;
};

/// One corrugation step F = f + Gamma(p, N l(p)) / N with the differential
/// dF = L + D / N, D being the frozen-phase derivative of Gamma taken by
/// central differences (second-order one-sided at the boundary). Nodes with
/// eta == 0 keep their position bitwise. Throws NotRiemannian, DegeneratePlane
/// or LostSpacelike.
StepResult cp_step(const EmbeddingJet& f, const PrimitiveMetric& mu, int N,
                   const StepOptions& options = {});

struct SelectionLimits {
  int N0 = 16;
  int N_cap = 1 << 20;
  double c0_budget = std::numeric_limits<double>::infinity();
};

struct Selection {
  int N = 0;
  int attempts = 0;
  StepResult step;
};

/// First N in N0, 2 N0, 4 N0, ... whose step is spacelike, has default at most
/// epsilon, moves points by at most the C0 budget and, when next_metric is
/// given, stays long for it. Throws BudgetExceeded past the cap.
Selection select_corrugation_number(const EmbeddingJet& f, const PrimitiveMetric& mu,
                                    double epsilon, const MetricField* next_metric,
                                    const StepOptions& options = {},
                                    const SelectionLimits& limits = {});

struct SuccessiveResult {
  EmbeddingJet jet;
  std::vector<CorrugationStepRecord> records;
};

/// Applies one selected step per primitive, in dictionary order, with
/// mu_j = F_{j-1}*h - eta_j dl_j^2. `final_metric`, when given, must be
/// long-dominated by the last output.
SuccessiveResult successive_cp(const EmbeddingJet& f, const PrimitiveDecomposition& decomp,
                               double per_step_eps, const StepOptions& options = {},
                               const SelectionLimits& limits = {},
                               const MetricField* final_metric = nullptr);

}  // namespace lcorr
