#include "lcorr/corrugation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lcorr/amplitude.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/parallel.hpp"

namespace lcorr {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMarginTolerance = 1e-12;

double reduced_phase(double s) { return s - std::floor(s); }

void require_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, std::string(what) + " is on a different grid");
}

// Trapezoid integral of gamma - mean over [0, s] with `samples` panels per period.
Vec3M trapezoid_primitive(const LoopNode& node, double s, int samples) {
  if (s == 0.0) return {};
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(s) * samples)));
  const double h = s / panels;
  const Vec3M mean = node.average();
  Vec3M sum = 0.5 * ((node.gamma(0.0) - mean) + (node.gamma(s) - mean));
  for (int i = 1; i < panels; ++i) sum += node.gamma(i * h) - mean;
  return h * sum;
}

// Composite 8-point Gauss-Legendre integral of gamma - mean over [0, s], with
// panel edges on every integer so whole periods are integrated separately.
Vec3M gauss_primitive(const LoopNode& node, double s, int panels_per_period) {
  static constexpr double kNodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                       0.9602898564975363};
  static constexpr double kWeights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                         0.1012285362903763};
  const Vec3M mean = node.average();
  auto panel = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Vec3M sum;
    for (int q = 0; q < 4; ++q) {
      sum += kWeights[q] * ((node.gamma(mid - half * kNodes[q]) - mean) + (node.gamma(mid + half * kNodes[q]) - mean));
    }
    return half * sum;
  };
  auto span = [&](double a, double b) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * panels_per_period)));
    const double h = (b - a) / panels;
    Vec3M sum;
    for (int i = 0; i < panels; ++i) sum += panel(a + i * h, a + (i + 1) * h);
    return sum;
  };
  const double sign = s < 0.0 ? -1.0 : 1.0;
  const double end = std::abs(s);
  const double whole = std::floor(end);
  Vec3M total;
  for (double m = 0.0; m < whole; m += 1.0) total += span(m, m + 1.0);
  if (end > whole) total += span(whole, end);
  return sign * total;
}

// Frozen-phase derivative of Gamma along one grid axis at node `k`.
Vec3M axis_derivative(const std::vector<LoopNode>& nodes, const Grid& g, int i, int j, bool along_x,
                      double s, const QuadratureOptions& q) {
  const int n = along_x ? g.nx() : g.ny();
  const int c = along_x ? i : j;
  const double h = along_x ? g.hx() : g.hy();
  auto at = [&](int m) -> Vec3M {
    const auto& node = nodes[along_x ? g.index(m, j) : g.index(i, m)];
    return node.primitive(s, q);
  };
  if (c == 0) return (1.0 / (2.0 * h)) * (-3.0 * at(0) + 4.0 * at(1) - at(2));
  if (c == n - 1) return (1.0 / (2.0 * h)) * (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3));
  return (1.0 / (2.0 * h)) * (at(c + 1) - at(c - 1));
}

}  // namespace

MetricField primitive_target(const EmbeddingJet& f, const PrimitiveMetric& mu) {
  require_grid(f.grid, mu.eta.grid, "eta field");
  MetricField out = pullback_metric(f);
  const Sym2 sq = mu.ell.square();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= mu.eta[k] * sq;
  return out;
}

double LoopNode::theta(double s) const { return alpha * std::cos(kTwoPi * s); }

Vec3M LoopNode::gamma(double s) const {
  const double th = theta(s);
  return r * (std::cosh(th) * frame.t + std::sinh(th) * frame.n);
}

Vec3M LoopNode::average() const { return (r * phi) * frame.t; }

Vec3M LoopNode::primitive(double s, const QuadratureOptions& q) const {
  if (idle()) return {};
  const double sigma = reduced_phase(s);
  if (q.rule == Quadrature::Trapezoid) return trapezoid_primitive(*this, sigma, q.samples_per_period);

  // cosh(a cos x) - I0(a) = 2 sum_{k even >= 2} I_k(a) cos(k x) and
  // sinh(a cos x) = 2 sum_{k odd} I_k(a) cos(k x); integrate over [0, sigma].
  const double c = std::cos(kTwoPi * sigma);
  double s_prev = 0.0;
  double s_cur = std::sin(kTwoPi * sigma);
  double even = 0.0;
  double odd = 0.0;
  for (std::size_t k = 1; k < bessel.size(); ++k) {
    const double term = bessel[k] * s_cur / (std::numbers::pi * static_cast<double>(k));
    if (k % 2 == 0) {
      even += term;
    } else {
      odd += term;
    }
    const double s_next = 2.0 * c * s_cur - s_prev;
    s_prev = s_cur;
    s_cur = s_next;
  }
  return r * (even * frame.t + odd * frame.n);
}

Vec3M LoopNode::primitive_unreduced(double s, int samples_per_period) const {
  if (idle()) return {};
  return gauss_primitive(*this, s, samples_per_period);
}

Vec3M LoopNode::normal_L(double s) const {
  const double th = theta(s);
  return std::sinh(th) * frame.t + std::cosh(th) * frame.n;
}

LoopNode make_loop_node(const Jacobian& df, double eta, const LinearForm& ell) {
  if (!(eta >= 0.0)) {
    throw Error(ErrorKind::DomainError, "primitive coefficient must be nonnegative");
  }
  LoopNode node;
  node.frame = corrugation_frame(df, ell);
  node.eta = eta;
  node.r = radial_factor(eta, node.frame.dl_u);
  if (node.idle()) {
    node.bessel = {1.0};
    return node;
  }
  node.alpha = amplitude(node.r, node.frame.dl_u);
  node.bessel = bessel_i_sequence(node.alpha);
  node.phi = node.bessel.front();
  return node;
}

Vec3M loop_gamma(const LoopNode& node, double s) { return node.gamma(s); }

Vec3M loop_average(const LoopNode& node) { return node.average(); }

Jacobian target_differential(const Jacobian& df, const LoopNode& node, const LinearForm& ell,
                             double s) {
  if (node.idle()) return df;
  const Vec3M jump = node.gamma(s) - (1.0 / node.dl_u()) * node.frame.t;
  return {df.dx + ell.a * jump, df.dy + ell.b * jump};
}

StepParams prepare_step(const EmbeddingJet& f, const PrimitiveMetric& mu, int N) {
  require_grid(f.grid, mu.eta.grid, "eta field");
  if (N < 1) throw Error(ErrorKind::DomainError, "corrugation number must be >= 1");
  StepParams p;
  p.ell = mu.ell;
  p.N = N;
  p.nodes.resize(f.grid.size());
  p.phase.resize(f.grid.size());
  const Grid& g = f.grid;
  parallel_for_nodes(g.size(), [&](std::size_t k) {
    p.nodes[k] = make_loop_node(f.differential[k], mu.eta[k], mu.ell);
    p.phase[k] = reduced_phase(N * mu.ell(g.x(g.col(k)), g.y(g.row(k))));
  });
  for (const auto& node : p.nodes) {
    p.alpha_max = std::max(p.alpha_max, node.alpha);
    p.eta_max = std::max(p.eta_max, node.eta);
  }
  return p;
}

std::vector<Jacobian> target_differential(const EmbeddingJet& f, const StepParams& params) {
  std::vector<Jacobian> out(f.grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = target_differential(f.differential[k], params.nodes[k], params.ell, params.phase[k]);
  }
  return out;
}

StepResult cp_step(const EmbeddingJet& f, const PrimitiveMetric& mu, int N,
                   const StepOptions& options) {
  const Grid& g = f.grid;
  if (options.norm_metric) require_grid(g, options.norm_metric->grid, "norm metric");
  const StepParams params = prepare_step(f, mu, N);
  const auto& q = options.quadrature;
  const double inv_n = 1.0 / N;

  StepResult result;
  EmbeddingJet& F = result.jet;
  F = EmbeddingJet(g);
  std::vector<Jacobian> L(g.size());

  // Phase 1: positions and target differential.
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto& node = params.nodes[k];
      L[k] = target_differential(f.differential[k], node, params.ell, params.phase[k]);
      if (node.idle()) {
        F.position[k] = f.position[k];
      } else {
        F.position[k] = exp_point(f.position[k], inv_n * node.primitive(params.phase[k], q));
      }
    }
  });

  // Phase 2: dF = L + D / N with D the frozen-phase derivative of Gamma.
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const int i = g.col(k);
      const int j = g.row(k);
      const double s = params.phase[k];
      const Vec3M dx = axis_derivative(params.nodes, g, i, j, true, s, q);
      const Vec3M dy = axis_derivative(params.nodes, g, i, j, false, s, q);
      F.differential[k] = {L[k].dx + inv_n * dx, L[k].dy + inv_n * dy};
    }
  });

  for (std::size_t k = 0; k < g.size(); ++k) {
    const Jacobian& d = F.differential[k];
    if (!(d.dx.finite() && d.dy.finite()) || pullback(d).min_eigenvalue() < kSpacelikeThreshold) {
      std::ostringstream os;
      os << "corrugated map is not spacelike at node (" << g.col(k) << ", " << g.row(k)
         << ") with N = " << N;
      throw Error(ErrorKind::LostSpacelike, os.str());
    }
  }

  CorrugationStepRecord& rec = result.record;
  rec.ell = params.ell;
  rec.N = N;
  rec.alpha_max = params.alpha_max;
  rec.eta_max = params.eta_max;

  const Sym2 sq = params.ell.square();
  std::vector<double> measured(g.size());
  std::vector<double> c0(g.size());
  std::vector<double> c1(g.size());
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const Sym2 mu_k = pullback(f.differential[k]) - mu.eta[k] * sq;
      const Sym2& gk = options.norm_metric ? (*options.norm_metric)[k] : mu_k;
      measured[k] = operator_norm_form(pullback(F.differential[k]) - mu_k, gk);
      c0[k] = euclidean_norm(F.position[k] - f.position[k]);
      c1[k] = operator_norm_map(F.differential[k] - f.differential[k], gk);
    }
  });
  rec.measured_sup_default = *std::max_element(measured.begin(), measured.end());
  rec.c0_shift = *std::max_element(c0.begin(), c0.end());
  rec.c1_shift = *std::max_element(c1.begin(), c1.end());

  if (!options.audit) return result;

  rec.M = M_constant(std::max(params.alpha_max, 1e-12), options.m_sampling);
  rec.K = K_constant(params.alpha_max);

  struct NodeAudit {
    double identity, average, normal_L, normal_F, tangency_F, tangency_L;
    double inc, inc_norm, grow_dF, grow_n, slack;
  };
  std::vector<NodeAudit> audits(g.size());
  parallel_for_nodes(g.size(), [&](std::size_t k) {
    const auto& node = params.nodes[k];
    const auto& fr = node.frame;
    const Jacobian& df = f.differential[k];
    const Jacobian& dF = F.differential[k];
    const double s = params.phase[k];
    const Sym2 mu_k = pullback(df) - mu.eta[k] * sq;
    NodeAudit a{};

    a.identity = (pullback(L[k]) - mu_k).max_abs_entry();
    a.average = node.idle() ? 0.0 : std::abs(node.r * node.phi - 1.0 / node.dl_u());

    const Vec3M nL = node.normal_L(s);
    const Vec3M Lv = L[k].apply(fr.v[0], fr.v[1]);
    const Vec3M Lu = L[k].apply(fr.u[0], fr.u[1]);
    a.normal_L = std::max({std::abs(minkowski_inner(nL, nL) + 1.0),
                           std::abs(minkowski_inner(nL, Lv)), std::abs(minkowski_inner(nL, Lu))});

    const Vec3M nF = timelike_unit_normal(dF.dx, dF.dy);
    const Vec3M dFv = dF.apply(fr.v[0], fr.v[1]);
    const Vec3M dFu = dF.apply(fr.u[0], fr.u[1]);
    a.normal_F = std::abs(minkowski_inner(nF, nF) + 1.0);
    a.tangency_F = std::max(std::abs(minkowski_inner(nF, dFv)), std::abs(minkowski_inner(nF, dFu)));
    a.tangency_L = N * std::max(std::abs(minkowski_inner(nL, dFv)), std::abs(minkowski_inner(nL, dFu)));

    // C1 increment bound, pointwise along u.
    const double t_norm = euclidean_norm(fr.t);
    const double n_norm = euclidean_norm(fr.n);
    const double sqrt_eta = std::sqrt(node.eta);
    a.slack = euclidean_norm((dF - L[k]).apply(fr.u[0], fr.u[1]));
    const double lhs_u = euclidean_norm((dF - df).apply(fr.u[0], fr.u[1]));
    a.inc = a.slack + rec.M * sqrt_eta * fr.dl_u * (t_norm + n_norm) - lhs_u;

    // Increment and growth bounds as operator norms with respect to mu <= f*h.
    const double df_norm = operator_norm_map(df, mu_k);
    const double slack_g = operator_norm_map(dF - L[k], mu_k);
    const double dl_norm = operator_norm_covector(params.ell.a, params.ell.b, mu_k);
    a.inc_norm = slack_g + rec.M * sqrt_eta * dl_norm * (df_norm + n_norm) -
                 operator_norm_map(dF - df, mu_k);
    a.grow_dF = rec.K * (df_norm + n_norm) + slack_g - operator_norm_map(dF, mu_k);
    a.grow_n = rec.K * (df_norm + n_norm) + euclidean_norm(nF - nL) - euclidean_norm(nF);
    audits[k] = a;
  });

  for (const auto& a : audits) {
    rec.identity_residual = std::max(rec.identity_residual, a.identity);
    rec.average_residual = std::max(rec.average_residual, a.average);
    rec.normal_L_residual = std::max(rec.normal_L_residual, a.normal_L);
    rec.normal_F_residual = std::max(rec.normal_F_residual, a.normal_F);
    rec.normal_F_tangency = std::max(rec.normal_F_tangency, a.tangency_F);
    rec.normal_L_tangency_scaled = std::max(rec.normal_L_tangency_scaled, a.tangency_L);
    rec.increment_slack = std::max(rec.increment_slack, a.slack);
    rec.increment_margin = std::min(rec.increment_margin, a.inc + kMarginTolerance);
    rec.increment_norm_margin = std::min(rec.increment_norm_margin, a.inc_norm + kMarginTolerance);
    rec.growth_dF_margin = std::min(rec.growth_dF_margin, a.grow_dF + kMarginTolerance);
    rec.growth_normal_margin = std::min(rec.growth_normal_margin, a.grow_n + kMarginTolerance);
  }
  rec.fd_consistency = differential_consistency(F).constant;
  return result;
}

Selection select_corrugation_number(const EmbeddingJet& f, const PrimitiveMetric& mu,
                                    double epsilon, const MetricField* next_metric,
                                    const StepOptions& options, const SelectionLimits& limits) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::DomainError, "epsilon must be positive");
  Selection sel;
  StepOptions probe = options;
  probe.audit = false;
  for (long N = limits.N0; N <= limits.N_cap; N *= 2) {
    ++sel.attempts;
    StepResult step;
    try {
      step = cp_step(f, mu, static_cast<int>(N), probe);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::LostSpacelike) continue;
      throw;
    }
    if (step.record.measured_sup_default > epsilon) continue;
    if (step.record.c0_shift > limits.c0_budget) continue;
    if (next_metric && !is_psd(pullback_metric(step.jet) - *next_metric)) continue;
    sel.N = static_cast<int>(N);
    sel.step = options.audit ? cp_step(f, mu, sel.N, options) : std::move(step);
    return sel;
  }
  std::ostringstream os;
  os << "no corrugation number up to " << limits.N_cap << " reaches epsilon " << epsilon;
  throw Error(ErrorKind::BudgetExceeded, os.str());
}

SuccessiveResult successive_cp(const EmbeddingJet& f, const PrimitiveDecomposition& decomp,
                               double per_step_eps, const StepOptions& options,
                               const SelectionLimits& limits, const MetricField* final_metric) {
  require_grid(f.grid, decomp.grid, "decomposition");
  SuccessiveResult out;
  out.jet = f;
  for (std::size_t j = 0; j < decomp.forms.size(); ++j) {
    const PrimitiveMetric mu{decomp.eta[j], decomp.forms[j]};
    const bool last = j + 1 == decomp.forms.size();
    Selection sel = select_corrugation_number(out.jet, mu, per_step_eps,
                                              last ? final_metric : nullptr, options, limits);
    out.jet = std::move(sel.step.jet);
    out.records.push_back(sel.step.record);
  }
  return out;
}

}  // namespace lcorr
