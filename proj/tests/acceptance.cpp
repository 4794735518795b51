// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criteria 7, 8 and 9 share one 257x257 flat-shrink run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "lcorr/amplitude.hpp"
#include "lcorr/bounds.hpp"
#include "lcorr/corrugation.hpp"
#include "lcorr/decomp.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/scenarios.hpp"
#include "lcorr/scheduler.hpp"

using namespace lcorr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  Verdict v;
  const auto t0 = Clock::now();
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("raised ") + e.what()};
  }
  failures += v.pass ? 0 : 1;
  std::printf("criterion %2d %s: %s  (%s; %.1fs)\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// I0 by its power series, written independently of the library.
double i0_series(double a) {
  const double q = 0.25 * a * a;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * m);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

PrimitiveMetric strip_mu(const Grid& g) { return *scenario("strip-primitive").primitive(g); }

}  // namespace

int main() {
  std::printf("acceptance run\n");

  report(1, "pullback identity on strip-primitive 65x65", [] {
    const auto t0 = Clock::now();
    const Grid g(65);
    const auto r = cp_step(bent_strip(g), strip_mu(g), 40).record;
    const double secs = seconds_since(t0);
    return Verdict{r.identity_residual <= 1e-9 && secs < 5.0,
                   fmt("sup |L*h - mu| = %.3e <= 1e-9, %.2fs < 5s", r.identity_residual, secs)};
  });

  report(2, "average condition r phi(alpha) = 1/dl(u)", [] {
    const Grid g(65);
    const auto params = prepare_step(bent_strip(g), strip_mu(g), 40);
    double worst = 0.0;
    for (const auto& node : params.nodes) {
      worst = std::max(worst, std::abs(node.r * phi(node.alpha) - 1.0 / node.dl_u()));
    }
    return Verdict{worst <= 1e-10, fmt("max residual %.3e <= 1e-10", worst)};
  });

  report(3, "O(1/N) decay on strip-primitive 257x257", [] {
    const auto t0 = Clock::now();
    const Grid g(257);
    const auto f = bent_strip(g);
    const auto mu = strip_mu(g);
    StepOptions opt;
    opt.audit = false;
    const int Ns[4] = {20, 40, 80, 160};
    double e[4];
    for (int i = 0; i < 4; ++i) e[i] = cp_step(f, mu, Ns[i], opt).record.measured_sup_default;
    bool ok = e[3] <= e[0] / 4.0;
    std::string detail = fmt("e = %.3e %.3e %.3e %.3e; ratios", e[0], e[1], e[2], e[3]);
    for (int i = 0; i < 3; ++i) {
      const double r = e[i] / e[i + 1];
      ok = ok && r >= 1.5 && r <= 2.5;
      detail += fmt(" %.3f", r);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 30.0;
    detail += fmt(" in [1.5,2.5]; e(160)/e(20) = %.3f <= 0.25; %.1fs < 30s", e[3] / e[0], secs);
    return Verdict{ok, detail};
  });

  report(4, "gluing on a 0.1 collar", [] {
    const Grid g(65);
    const auto f = bent_strip(g);
    const PrimitiveMetric mu{collar_bump(g, 0.1, 0.5), {1.0, 0.0}};
    const auto r = cp_step(f, mu, 40);
    int collar = 0, moved = 0, eta_nonzero = 0;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const double d = std::min({g.x(i), 1.0 - g.x(i), g.y(j), 1.0 - g.y(j)});
        if (d > 0.1) continue;
        const std::size_t k = g.index(i, j);
        ++collar;
        eta_nonzero += mu.eta[k] != 0.0;
        moved += !(r.jet.position[k] == f.position[k]);
      }
    }
    return Verdict{collar > 0 && moved == 0 && eta_nonzero == 0,
                   fmt("%g collar nodes, %g moved, %g with eta != 0", collar, moved, eta_nonzero)};
  });

  report(5, "phi against the I0 series", [] {
    double worst = 0.0, round_trip = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double a = 5.0 * i / 99.0;
      worst = std::max(worst, std::abs(phi(a) - i0_series(a)));
      round_trip = std::max(round_trip, std::abs(phi_inverse(phi(a)).alpha - a));
    }
    const bool exact0 = phi(0.0) == 1.0;
    return Verdict{worst <= 1e-10 && exact0 && round_trip <= 1e-9,
                   fmt("max |phi - I0| = %.3e, phi(0) = %.17g, inverse round trip %.3e", worst, phi(0.0),
                       round_trip)};
  });

  report(6, "psi limits and identity", [] {
    const double e2 = std::abs(psi2(1e-3) - 2.0);
    const double e1 = std::abs(psi1(1e-3) - 1.5);
    double id = 0.0;
    for (double a : {0.5, 1.0, 2.0}) id = std::max(id, std::abs(psi(a) - (std::sqrt(2.0 * psi1(a)) + std::sqrt(psi2(a)))));
    return Verdict{e2 <= 1e-3 && e1 <= 5e-3 && id <= 1e-10,
                   fmt("psi2(1e-3) = %.6f, psi1(1e-3) = %.6f, identity residual %.3e", psi2(1e-3), psi1(1e-3), id)};
  });

  std::printf("running flat-shrink, 6 practical stages on 257x257 ...\n");
  std::fflush(stdout);
  RunConfig cfg;
  cfg.grid = 257;
  cfg.stages = 6;
  cfg.mode = ScheduleMode::Practical;
  cfg.write_meshes = false;
  RunResult run;
  std::string run_error;
  const auto run_t0 = Clock::now();
  try {
    run = run_nash_kuiper(cfg, [&](const StageRow& r, const EmbeddingJet&) {
      std::printf("  stage %d: |f*h - g_n| = %.4e <= %.4e, |f*h - g| = %.4e, N =", r.n, r.sup_default,
                  r.cond1_rhs, r.sup_default_target);
      for (int N : r.N) std::printf(" %d", N);
      std::printf(" [%.1fs]\n", seconds_since(run_t0));
      std::fflush(stdout);
    });
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  const double run_secs = seconds_since(run_t0);

  report(7, "step bound audits on every flat-shrink step", [&] {
    if (!run_error.empty()) return Verdict{false, "run raised " + run_error};
    double inc = 1e300, grow = 1e300, slack = 0.0, kdev = 0.0, mdev = 0.0, amax = 0.0;
    int steps = 0;
    for (const auto& stage : run.ledger.steps) {
      for (const auto& r : stage) {
        ++steps;
        inc = std::min({inc, r.increment_margin, r.increment_norm_margin});
        grow = std::min({grow, r.growth_dF_margin, r.growth_normal_margin});
        slack = std::max(slack, r.increment_slack);
        kdev = std::max(kdev, std::abs(r.K - (2.0 * std::cosh(r.alpha_max) + 1.0)));
        mdev = std::max(mdev, std::abs(r.M - M_constant(r.alpha_max)));
        amax = std::max(amax, r.alpha_max);
      }
    }
    return Verdict{steps > 0 && inc >= 0.0 && grow >= 0.0 && kdev <= 1e-12 && mdev <= 1e-12,
                   fmt("%g steps, min increment margin %.3e, min growth margin %.3e, max O(1/N) slack %.3e", steps,
                       inc, grow, slack) +
                       fmt(", step alpha <= %.4f (a priori %.4f)", amax, run.constants.alpha_max)};
  });

  report(8, "normal of F on every step", [&] {
    if (!run_error.empty()) return Verdict{false, "run raised " + run_error};
    double unit = 0.0, tangency = -1e300, worst_scaled = 0.0;
    for (const auto& stage : run.ledger.steps) {
      for (const auto& r : stage) {
        unit = std::max(unit, r.normal_F_residual);
        tangency = std::max(tangency, r.normal_F_tangency - 10.0 / r.N);
        worst_scaled = std::max(worst_scaled, r.normal_F_tangency * r.N);
      }
    }
    return Verdict{unit <= 1e-8 && tangency <= 0.0,
                   fmt("max |h(n,n)+1| = %.3e, max N |h(n,dF)| = %.3e <= 10", unit, worst_scaled)};
  });

  report(9, "end-to-end flat-shrink convergence", [&] {
    if (!run_error.empty()) return Verdict{false, "run raised " + run_error};
    bool cond1 = run.ledger.rows.size() == 6;
    bool monotone = true;
    double prev = run.initial_default;
    for (const auto& r : run.ledger.rows) {
      cond1 = cond1 && r.cond1_pass;
      monotone = monotone && r.sup_default_target < prev;
      prev = r.sup_default_target;
    }
    const bool fin = run.final_default <= 0.05 * run.initial_default;
    const bool drift = run.drift <= cfg.epsilon;
    const bool ok = cond1 && monotone && fin && drift;
    return Verdict{ok, fmt("final %.4e <= %.4e, drift %.4e <= 0.05, %.0fs", run.final_default,
                           0.05 * run.initial_default, run.drift, run_secs) +
                           (cond1 ? ", condition (1) every stage" : ", condition (1) violated") +
                           (monotone ? ", monotone" : ", not monotone")};
  });

  report(10, "decomposition round trip and k=3 closed form", [] {
    const FormDictionary d5 = build_dictionary(5);
    const Grid g(33);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      MetricField delta(g);
      for (auto& v : delta.values) {
        Sym2 m;
        for (const auto& f : d5.forms) m += u(rng) * f.square();
        v = m;
      }
      const MetricField back = reconstruct(decompose(delta, d5));
      for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, (back[k] - delta[k]).frobenius());
    }
    const FormDictionary d3 = build_dictionary(3);
    Eigen::Matrix3d A;
    for (int j = 0; j < 3; ++j) {
      const Sym2 s = d3.forms[j].square();
      A.col(j) << s.E, s.F, s.G;
    }
    const auto qr = A.colPivHouseholderQr();
    double diff = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      Sym2 m;
      for (const auto& f : d3.forms) m += u(rng) * f.square();
      const Eigen::Vector3d x = qr.solve(Eigen::Vector3d(m.E, m.F, m.G));
      const auto eta = decompose_node(m, d3);
      for (int j = 0; j < 3; ++j) diff = std::max(diff, std::abs(eta[j] - x[j]));
    }
    return Verdict{worst <= 1e-9 && diff <= 1e-12,
                   fmt("100 fields: max residual %.3e <= 1e-9; k=3 vs linear solve %.3e <= 1e-12", worst, diff)};
  });

  report(11, "theoretical schedule summability over 20 stages", [&] {
    const double Kt = run_error.empty() ? run.constants.K_tilde : K_tilde(1.0, 5);
    const Schedule s = make_schedule(Kt, 20, ScheduleMode::Theoretical);
    double worst = 0.0;
    bool increasing = true;
    for (int n = 2; n <= 20; ++n) {
      worst = std::max(worst, s.term_ratio(n));
      increasing = increasing && s.partial_sums[n] > s.partial_sums[n - 1];
    }
    const bool finite = std::isfinite(s.partial_sums[20]);
    return Verdict{worst <= 0.9 && increasing && finite,
                   fmt("K_tilde = %.4e, rho = %.4e, max term ratio %.6f <= 0.9, partial sum %.6e", Kt, s.rho, worst,
                       s.partial_sums[20])};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
