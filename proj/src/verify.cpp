#include "lcorr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "lcorr/amplitude.hpp"
#include "lcorr/bounds.hpp"
#include "lcorr/corrugation.hpp"
#include "lcorr/decomp.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/scenarios.hpp"
#include "lcorr/scheduler.hpp"

namespace lcorr {
namespace {

class Collector {
 public:
  Collector(VerifyReport& report, const std::function<void(const CheckResult&)>& progress)
      : report_(report), progress_(progress) {}

  // measured <= bound
  void at_most(const std::string& module, const std::string& name, const std::string& claim,
               double measured, double bound) {
    push({module, name, claim, measured, bound, bound - measured, measured <= bound});
  }
  // measured >= bound
  void at_least(const std::string& module, const std::string& name, const std::string& claim,
                double measured, double bound) {
    push({module, name, claim, measured, bound, measured - bound, measured >= bound});
  }
  void holds(const std::string& module, const std::string& name, const std::string& claim, bool ok) {
    push({module, name, claim, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, ok});
  }
  // Runs `body`; an escaping engine error becomes a failed check.
  template <class F>
  void guarded(const std::string& module, const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      push({module, name, std::string("raised: ") + e.what(), 1.0, 0.0, -1.0, false});
    }
  }

 private:
  void push(CheckResult r) {
    report_.checks.push_back(r);
    if (progress_) progress_(report_.checks.back());
  }
  VerifyReport& report_;
  const std::function<void(const CheckResult&)>& progress_;
};

PrimitiveMetric strip_primitive(const Grid& g) { return *scenario("strip-primitive").primitive(g); }

void check_lorentz(Collector& c) {
  c.guarded("lorentz", "unit normal", [&] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    bool future = true;
    int tested = 0;
    while (tested < 200) {
      const Vec3M t1{u(rng), u(rng), 0.5 * u(rng)};
      const Vec3M t2{u(rng), u(rng), 0.5 * u(rng)};
      const double E = minkowski_inner(t1, t1), F = minkowski_inner(t1, t2), G = minkowski_inner(t2, t2);
      if (0.5 * (E + G) - std::hypot(0.5 * (E - G), F) < 1e-3) continue;
      const Vec3M n = timelike_unit_normal(t1, t2);
      worst = std::max({worst, std::abs(minkowski_inner(n, n) + 1.0), std::abs(minkowski_inner(n, t1)),
                        std::abs(minkowski_inner(n, t2))});
      future = future && n.z > 0.0;
      ++tested;
    }
    c.at_most("lorentz", "unit normal", "h(n,n) = -1 and h(n,t_i) = 0 on 200 random spacelike planes",
              worst, 1e-12);
    c.holds("lorentz", "future orientation", "every computed normal has z > 0", future);
  });
}

void check_fields(Collector& c, const Grid& grid) {
  c.guarded("fields", "pullback", [&] {
    const auto strip = bent_strip(grid);
    const double err = operator_norm_form(pullback_metric(strip) - constant_metric(grid, Sym2::identity()),
                                          constant_metric(grid, Sym2::identity()));
    c.at_most("fields", "pullback", "bent strip induces dx^2 + dy^2", err, 1e-12);

    bool raised = false;
    try {
      isometric_default(constant_metric(grid, {0.75, 0.0, 1.0}), constant_metric(grid, Sym2::identity()));
    } catch (const Error& e) {
      raised = e.kind() == ErrorKind::NotLong;
    }
    c.holds("fields", "longness", "isometric_default rejects induced diag(0.75,1) against I", raised);

    const Sym2 B{0.3, -0.2, 0.7};
    const Sym2 gm{2.0, 0.5, 1.5};
    const double hom = std::abs(operator_norm_form(B, 0.25 * gm) - 4.0 * operator_norm_form(B, gm));
    c.at_most("fields", "norm homogeneity", "|B|_{g/4} = 4 |B|_g", hom, 1e-12);
  });
}

void check_amplitude(Collector& c, const Grid& grid) {
  c.guarded("amplitude", "phi", [&] {
    double worst = 0.0;
    double round_trip = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double a = 5.0 * i / 99.0;
      worst = std::max(worst, std::abs(phi(a) - std::cyl_bessel_i(0.0, a)) / std::max(1.0, std::cyl_bessel_i(0.0, a)));
      round_trip = std::max(round_trip, std::abs(phi_inverse(phi(a)).alpha - a));
    }
    c.at_most("amplitude", "phi series", "phi(alpha) equals I0(alpha) for 100 alpha in [0,5]", worst, 1e-10);
    c.holds("amplitude", "phi(0)", "phi(0) = 1 exactly", phi(0.0) == 1.0);
    c.at_most("amplitude", "phi inverse", "phi_inverse(phi(alpha)) = alpha on the same samples", round_trip, 1e-9);
    double quad = 0.0;
    for (double a : {0.1, 0.5, 1.0, 2.0}) quad = std::max(quad, std::abs(phi_trapezoid(a, 64) - phi(a)));
    c.at_most("amplitude", "phi quadrature", "64-point trapezoid agrees with the series", quad, 1e-12);

    const auto mu = strip_primitive(grid);
    const auto f = bent_strip(grid);
    double avg = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const LoopNode node = make_loop_node(f.differential[k], mu.eta[k], mu.ell);
      avg = std::max(avg, std::abs(node.r * phi(node.alpha) - 1.0 / node.dl_u()));
    }
    c.at_most("amplitude", "average condition", "r phi(alpha) = 1/dl(u) at every strip node", avg, 1e-10);

    double prev = 0.0;
    bool monotone = true;
    for (int i = 1; i <= 50; ++i) {
      const double eta = 0.99 * i / 50.0;
      const double a = amplitude(radial_factor(eta, 1.0), 1.0);
      monotone = monotone && a > prev;
      prev = a;
    }
    c.holds("amplitude", "monotone amplitude", "alpha increases strictly with eta at dl(u) = 1", monotone);
  });
}

void check_decomp(Collector& c, const Grid& grid) {
  c.guarded("decomp", "round trip", [&] {
    const FormDictionary dict = build_dictionary(5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      MetricField delta(grid);
      for (std::size_t k = 0; k < grid.size(); k += 1) {
        Sym2 m;
        for (const auto& f : dict.forms) m += u(rng) * f.square();
        delta[k] = m;
      }
      const auto decomp = decompose(delta, dict);
      double r = 0.0;
      const MetricField back = reconstruct(decomp);
      for (std::size_t k = 0; k < grid.size(); ++k) r = std::max(r, (back[k] - delta[k]).frobenius());
      worst = std::max(worst, r);
      if (grid.size() > 5000 && trial >= 9) break;
    }
    c.at_most("decomp", "round trip", "decompose then reconstruct random fields in the k=5 cone", worst, 1e-9);

    const FormDictionary d3 = build_dictionary(3);
    Eigen::Matrix3d A;
    for (int j = 0; j < 3; ++j) {
      const Sym2 s = d3.forms[j].square();
      A.col(j) << s.E, s.F, s.G;
    }
    double diff = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      Sym2 m;
      for (const auto& f : d3.forms) m += u(rng) * f.square();
      const Eigen::Vector3d x = A.colPivHouseholderQr().solve(Eigen::Vector3d(m.E, m.F, m.G));
      const auto eta = decompose_node(m, d3);
      for (int j = 0; j < 3; ++j) diff = std::max(diff, std::abs(eta[j] - x[j]));
    }
    c.at_most("decomp", "closed form k=3", "closed-form coefficients match a 3x3 linear solve", diff, 1e-12);
  });
}

void check_bounds(Collector& c) {
  c.guarded("bounds", "limits", [&] {
    c.at_most("bounds", "psi2 limit", "psi2(1e-3) = 2 (limit at 0)", std::abs(psi2(1e-3) - 2.0), 1e-3);
    c.at_most("bounds", "psi1 limit", "psi1(1e-3) = 3/2 (limit at 0)", std::abs(psi1(1e-3) - 1.5), 5e-3);
    double id = 0.0;
    for (double a : {0.5, 1.0, 2.0}) id = std::max(id, std::abs(psi(a) - (std::sqrt(2.0 * psi1(a)) + std::sqrt(psi2(a)))));
    c.at_most("bounds", "psi identity", "psi = sqrt(2 psi1) + sqrt(psi2) at 0.5, 1, 2", id, 1e-10);

    for (double amax : {0.5, 1.0, 2.0}) {
      const double M = M_constant(amax);
      double worst = -1e300;
      for (int i = 1; i <= 4096; ++i) {
        const double a = amax * i / 4096.0;
        const double p = phi(a);
        const double lhs = (std::sqrt(2.0 * std::cosh(a) * std::cosh(a) - 2.0 * p) + std::sinh(a)) / p;
        worst = std::max(worst, lhs - M * std::sqrt(1.0 - 1.0 / (p * p)));
      }
      char name[64];
      std::snprintf(name, sizeof name, "M inequality (alpha_max=%g)", amax);
      c.at_most("bounds", name, "defining inequality of M at 4096 alpha samples", worst, 0.0);
    }
    double kt = 0.0;
    for (double a : {0.0, 0.5, 1.0}) {
      for (int k : {3, 5}) kt = std::max(kt, std::abs(K_tilde(a, k) / std::pow(2.0 * K_constant(a), k) - 1.0));
    }
    c.at_most("bounds", "K_tilde", "K_tilde = (2K)^k", kt, 1e-14);
    double cosh_gap = -1e300;
    for (int i = 0; i <= 200; ++i) cosh_gap = std::max(cosh_gap, phi(0.05 * i) - std::cosh(0.05 * i));
    c.at_most("bounds", "phi below cosh", "phi(alpha) <= cosh(alpha) on [0,10]", cosh_gap, 0.0);
  });
}

void check_corrugation(Collector& c, const Grid& grid, bool full) {
  c.guarded("corrugation", "strip step", [&] {
    const auto f = bent_strip(grid);
    const auto mu = strip_primitive(grid);
    const StepResult step = cp_step(f, mu, 40);
    const auto& r = step.record;
    c.at_most("corrugation", "metric identity", "L*h = mu at every node", r.identity_residual, 1e-9);
    c.at_most("corrugation", "normal to L", "h(n_L,n_L) = -1 and n_L is h-orthogonal to L", r.normal_L_residual, 1e-10);
    c.at_most("corrugation", "unit normal of F", "h(n_F,n_F) = -1", r.normal_F_residual, 1e-8);
    c.at_most("corrugation", "normal tangency", "|h(n_F, dF)| <= 10/N", r.normal_F_tangency, 10.0 / r.N);

    const StepParams params = prepare_step(f, mu, 40);
    double reduction = 0.0;
    for (std::size_t k = 0; k < grid.size(); k += std::max<std::size_t>(1, grid.size() / 97)) {
      const double s = 40 * mu.ell(grid.x(grid.col(k)), grid.y(grid.row(k)));
      const Vec3M a = params.nodes[k].primitive(s);
      const Vec3M b = params.nodes[k].primitive_unreduced(s, 64);
      reduction = std::max(reduction, euclidean_norm(a - b));
    }
    c.at_most("corrugation", "periodicity reduction", "Gamma over [0, N l] equals Gamma over the reduced phase",
              reduction, 1e-10);

    PrimitiveMetric bump{collar_bump(grid, 0.1, 0.5), mu.ell};
    const StepResult glued = cp_step(f, bump, 40);
    bool same = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (bump.eta[k] == 0.0) same = same && glued.jet.position[k] == f.position[k];
    }
    c.holds("corrugation", "gluing", "F = f bitwise wherever eta = 0", same);

    if (full) {
      double e[4];
      const int Ns[4] = {20, 40, 80, 160};
      StepOptions opt;
      opt.audit = false;
      for (int i = 0; i < 4; ++i) e[i] = cp_step(f, mu, Ns[i], opt).record.measured_sup_default;
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i < 3; ++i) {
        lo = std::min(lo, e[i] / e[i + 1]);
        hi = std::max(hi, e[i] / e[i + 1]);
      }
      c.at_least("corrugation", "O(1/N) decay (min ratio)", "e(N)/e(2N) >= 1.5 over N = 20..160", lo, 1.5);
      c.at_most("corrugation", "O(1/N) decay (max ratio)", "e(N)/e(2N) <= 2.5 over N = 20..160", hi, 2.5);
      c.at_most("corrugation", "O(1/N) decay (span)", "e(160) <= e(20)/4", e[3], e[0] / 4.0);
    }
  });
}

void check_scheduler(Collector& c, int grid, bool full) {
  c.guarded("scheduler", "schedule", [&] {
    const Schedule th = make_schedule(K_tilde(1.0, 5), 20, ScheduleMode::Theoretical);
    double worst = 0.0;
    for (int n = 2; n <= 20; ++n) worst = std::max(worst, th.term_ratio(n));
    c.at_most("scheduler", "summability", "theoretical terms shrink with ratio <= 0.9 over 20 stages", worst, 0.9);
    const Schedule pr = make_schedule(216.0, 6, ScheduleMode::Practical);
    bool dyadic = true;
    for (int n = 0; n <= 6; ++n) dyadic = dyadic && pr.deltas[n] == std::ldexp(1.0, -n);
    c.holds("scheduler", "practical deltas", "practical schedule is 1, 1/2, ..., 1/64", dyadic);
    c.at_most("scheduler", "C0 budgets", "sum of a_n below epsilon", pr.budget_total(), pr.epsilon);
  });

  c.guarded("scheduler", "flat-shrink run", [&] {
    RunConfig cfg;
    cfg.grid = grid;
    cfg.stages = full ? 6 : 2;
    cfg.write_meshes = false;
    const RunResult run = run_nash_kuiper(cfg);
    double cond1 = -1e300, tri = -1e300, c0 = -1e300;
    double inc = 1e300, grow = 1e300, nf = 0.0, tan = -1e300, ident = 0.0;
    bool longness = true;
    for (std::size_t s = 0; s < run.ledger.rows.size(); ++s) {
      const auto& row = run.ledger.rows[s];
      cond1 = std::max(cond1, row.sup_default - row.cond1_rhs);
      tri = std::max(tri, row.triangle_lhs - row.triangle_rhs);
      c0 = std::max(c0, row.c0_increment - row.a_n);
      longness = longness && row.long_next;
      for (const auto& r : run.ledger.steps[s]) {
        inc = std::min({inc, r.increment_margin, r.increment_norm_margin});
        grow = std::min({grow, r.growth_dF_margin, r.growth_normal_margin});
        nf = std::max(nf, r.normal_F_residual);
        tan = std::max(tan, r.normal_F_tangency - 10.0 / r.N);
        ident = std::max(ident, r.identity_residual);
      }
    }
    c.at_most("scheduler", "condition (1)", "|f_n*h - g_n| - |g_{n+1} - g_n| <= 0 at every stage", cond1, 0.0);
    c.holds("scheduler", "longness chaining", "f_n*h - g_{n+1} is PSD after every stage", longness);
    c.at_most("scheduler", "C0 budget", "stage C0 increment - a_n <= 0", c0, 0.0);
    c.at_most("scheduler", "triangle slack", "|f_{n-1}*h - g_n|^1/2 - 2|g_n - g_{n-1}|^1/2 <= 0", tri, 1e-12);
    c.at_least("corrugation", "C1 increment bound", "min margin of the M(alpha_max) increment bound", inc, 0.0);
    c.at_least("corrugation", "growth bound", "min margin of the K(alpha_max) bounds on dF and n_F", grow, 0.0);
    c.at_most("corrugation", "step identity", "L*h = mu on every step of the run", ident, 1e-9);
    c.at_most("corrugation", "unit normal (run)", "h(n_F,n_F) = -1 on every step", nf, 1e-8);
    c.at_most("corrugation", "normal tangency (run)", "|h(n_F,dF)| - 10/N <= 0 on every step", tan, 0.0);
    if (full) {
      c.at_most("scheduler", "final default", "|f_6*h - g| <= 0.05 |Delta|", run.final_default,
                0.05 * run.initial_default);
      c.at_most("scheduler", "drift", "cumulative C0 drift <= epsilon", run.drift, cfg.epsilon);
    }
  });
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  os << "verify " << (level == VerifyLevel::Full ? "full" : "quick") << " (" << grid << "x" << grid << ")\n";
  int failed = 0;
  for (const auto& r : checks) {
    char line[512];
    std::snprintf(line, sizeof line, "[%s] %-12s %-30s measured=%-12.5g bound=%-12.5g slack=%-12.5g %s\n",
                  r.pass ? "PASS" : "FAIL", r.module.c_str(), r.name.c_str(), r.measured, r.bound, r.slack,
                  r.claim.c_str());
    os << line;
    failed += r.pass ? 0 : 1;
  }
  os << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return os.str();
}

VerifyReport verify(VerifyLevel level, const std::function<void(const CheckResult&)>& progress) {
  VerifyReport report;
  report.level = level;
  const bool full = level == VerifyLevel::Full;
  report.grid = full ? 257 : 65;
  const Grid grid(report.grid);
  Collector c(report, progress);
  check_lorentz(c);
  check_fields(c, grid);
  check_amplitude(c, grid);
  check_decomp(c, grid);
  check_bounds(c);
  check_corrugation(c, grid, full);
  check_scheduler(c, report.grid, full);
  return report;
}

}  // namespace lcorr
