#include "lcorr/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "lcorr/amplitude.hpp"
#include "lcorr/config.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/io.hpp"
#include "lcorr/parallel.hpp"
#include "lcorr/scenarios.hpp"

namespace lcorr {
namespace {

// Keeps sqrt(rho) 2 K_tilde strictly under the target ratio after rounding.
constexpr double kTheoreticalRatio = 0.9;
constexpr double kRatioGuard = 1.0 - 1e-12;
constexpr double kTriangleTolerance = 1e-12;

std::string flag(bool b) { return b ? "pass" : "fail"; }

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + std::to_string(v[i]);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_real(v[i]);
  return out;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string stage_mesh_name(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "stage_%03d.obj", n);
  return buf;
}

}  // namespace

const char* to_string(ScheduleMode mode) {
  return mode == ScheduleMode::Theoretical ? "theoretical" : "practical";
}

ScheduleMode parse_schedule_mode(const std::string& s) {
  if (s == "theoretical") return ScheduleMode::Theoretical;
  if (s == "practical") return ScheduleMode::Practical;
  throw Error(ErrorKind::Config, "mode must be 'theoretical' or 'practical', got '" + s + "'");
}

double Schedule::term_ratio(int n) const {
  if (n < 2 || n >= static_cast<int>(log_terms.size())) {
    throw Error(ErrorKind::DomainError, "term ratio needs 2 <= n <= stages");
  }
  return std::exp(log_terms[n] - log_terms[n - 1]);
}

double Schedule::budget_total() const {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

Schedule make_schedule(double K_tilde, int stages, ScheduleMode mode, double epsilon) {
  if (stages < 1) throw Error(ErrorKind::Config, "stages must be >= 1");
  if (!(K_tilde > 0.0)) throw Error(ErrorKind::Config, "K_tilde must be positive");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Config, "epsilon must be positive");

  Schedule s;
  s.mode = mode;
  s.stages = stages;
  s.K_tilde = K_tilde;
  s.epsilon = epsilon;
  const double log_base = std::log(2.0 * K_tilde);
  if (mode == ScheduleMode::Theoretical) {
    const double root = kTheoreticalRatio * kRatioGuard / (2.0 * K_tilde);
    s.rho = root * root;
  } else {
    s.rho = 0.5;
  }
  const double log_rho = std::log(s.rho);

  s.deltas.resize(stages + 2);
  for (int n = 0; n <= stages + 1; ++n) s.deltas[n] = std::pow(s.rho, n);
  s.deltas[0] = 1.0;

  s.a.assign(stages + 1, 0.0);
  s.terms.assign(stages + 1, 0.0);
  s.log_terms.assign(stages + 1, -std::numeric_limits<double>::infinity());
  s.partial_sums.assign(stages + 1, 0.0);
  for (int n = 1; n <= stages; ++n) {
    s.a[n] = epsilon * std::ldexp(1.0, -n - 1);
    // delta_{n-1} - delta_n = rho^{n-1} (1 - rho).
    const double log_gap = (n - 1) * log_rho + std::log1p(-s.rho);
    s.log_terms[n] = 0.5 * log_gap + n * log_base;
    s.terms[n] = std::exp(s.log_terms[n]);
    s.partial_sums[n] = s.partial_sums[n - 1] + s.terms[n];
  }
  return s;
}

std::vector<MetricField> stage_metrics(const MetricField& g, const MetricField& delta_field,
                                       const Schedule& schedule) {
  std::vector<MetricField> out;
  out.reserve(schedule.deltas.size());
  for (double d : schedule.deltas) out.push_back(g + d * delta_field);
  return out;
}

double sup_norm(const MetricField& form, const MetricField& g) { return operator_norm_form(form, g); }

BoundConstants run_constants(const EmbeddingJet& f0, const MetricField& g,
                             const PrimitiveDecomposition& decomp, const MSampling& sampling,
                             double metric_slack) {
  // Step j of a single pass sees f0*h minus the primitives before it; later
  // stages see smaller coefficients against larger fractions of that metric.
  MetricField seen = pullback_metric(f0) - metric_slack * g;
  double x = 0.0;
  for (std::size_t j = 0; j < decomp.forms.size(); ++j) {
    const LinearForm& ell = decomp.forms[j];
    const Sym2 sq = ell.square();
    for (std::size_t k = 0; k < seen.size(); ++k) {
      const double dl = operator_norm_covector(ell.a, ell.b, seen[k]);
      x = std::max(x, decomp.eta[j][k] * dl * dl);
      seen[k] -= decomp.eta[j][k] * sq;
    }
  }
  if (x >= 1.0) throw Error(ErrorKind::NotRiemannian, "a primitive coefficient exhausts f0*h");
  const double alpha = x > 0.0 ? phi_inverse(1.0 / std::sqrt(1.0 - x)).alpha : 0.0;

  BoundConstants c = bound_constants(alpha, static_cast<int>(decomp.forms.size()), sampling);
  c.c = form_constant_c(decomp, g);
  c.T = T_constant(c.M, c.c, f0, g);
  return c;
}

StageResult run_stage(const EmbeddingJet& f_prev, const StageTargets& t, const FormDictionary& dict,
                      const BoundConstants& constants, const StageOptions& options) {
  if (!t.g || !t.g_prev || !t.g_n || !t.g_next) {
    throw Error(ErrorKind::Config, "stage targets are incomplete");
  }
  const MetricField& g = *t.g;
  StageResult out;
  StageRow& row = out.row;
  row.n = t.n;
  row.delta = t.delta;
  row.a_n = t.a_n;

  const MetricField induced = pullback_metric(f_prev);
  const MetricField D = isometric_default(induced, *t.g_n);
  const PrimitiveDecomposition decomp = decompose(D, dict);
  row.decomposition_residual = decomp.residual;
  row.c_measured = form_constant_c(decomp, g);

  row.cond1_rhs = sup_norm(*t.g_n - *t.g_next, g);
  const double g_increment = sup_norm(*t.g_n - *t.g_prev, g);
  row.triangle_lhs = std::sqrt(sup_norm(D, g));
  row.triangle_rhs = 2.0 * std::sqrt(g_increment);
  row.triangle_pass = row.triangle_lhs <= row.triangle_rhs * (1.0 + kTriangleTolerance) + kTriangleTolerance;

  StepOptions step = options.step;
  step.norm_metric = &g;
  SelectionLimits limits = options.limits;
  const std::size_t k = decomp.forms.size();
  limits.c0_budget = t.a_n / static_cast<double>(k);

  // F_k*h - g_n is the sum of the step errors F_j*h - mu_j, so handing out
  // `fraction * rhs` in total keeps condition (1) by the triangle inequality.
  const double total = options.budget_fraction * row.cond1_rhs;
  double used = 0.0;
  EmbeddingJet jet = f_prev;
  for (std::size_t j = 0; j < k; ++j) {
    const PrimitiveMetric mu{decomp.eta[j], decomp.forms[j]};
    const double eps = std::max((total - used) / static_cast<double>(k - j),
                                std::numeric_limits<double>::min());
    const bool last = j + 1 == k;
    Selection sel = select_corrugation_number(jet, mu, eps, last ? t.g_next : nullptr, step, limits);
    used += sel.step.record.measured_sup_default;
    jet = std::move(sel.step.jet);
    const auto& rec = sel.step.record;
    row.N.push_back(rec.N);
    row.alpha.push_back(rec.alpha_max);
    row.alpha_max = std::max(row.alpha_max, rec.alpha_max);
    if (step.audit) {
      row.increment_bound_pass = row.increment_bound_pass && rec.increment_bound_pass();
      row.growth_bound_pass = row.growth_bound_pass && rec.growth_bound_pass();
    }
    out.steps.push_back(rec);
  }

  const MetricField result_metric = pullback_metric(jet);
  row.sup_default = sup_norm(result_metric - *t.g_n, g);
  row.cond1_pass = row.sup_default <= row.cond1_rhs;
  row.long_next = is_psd(result_metric - *t.g_next);
  row.sup_default_target = sup_norm(result_metric - g, g);

  row.c0_increment = c0_distance(f_prev, jet);
  row.c0_pass = row.c0_increment <= t.a_n;
  row.c1_increment_g = c1_increment(f_prev, jet, g);
  row.c1_increment_euclid = c1_increment(f_prev, jet, constant_metric(g.grid, Sym2::identity()));

  const double growth = std::exp(t.n * std::log(2.0 * constants.K_tilde));
  row.cond3_rhs = t.a_n + constants.T * std::sqrt(g_increment) * growth;
  row.cond3_ratio_g = row.c1_increment_g / row.cond3_rhs;
  row.cond3_ratio_euclid = row.c1_increment_euclid / row.cond3_rhs;
  row.cond3_pass = row.cond3_ratio_g <= 1.0 && row.cond3_ratio_euclid <= 1.0;

  out.jet = std::move(jet);
  return out;
}

std::string RunLedger::csv() const {
  CsvTable t({"stage", "delta", "status", "sup_default", "cond1_rhs", "cond1", "long_next",
              "sup_default_target", "N", "alpha", "alpha_max", "decomposition_residual", "c_measured",
              "a_n", "c0_increment", "c0_budget", "c1_increment_g", "c1_increment_euclid", "cond3_rhs",
              "cond3_ratio_g", "cond3_ratio_euclid", "cond3_tighter", "cond3", "triangle_lhs",
              "triangle_rhs", "triangle", "increment_bound", "growth_bound"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.n), format_real(r.delta), csv_safe(r.status), format_real(r.sup_default),
               format_real(r.cond1_rhs), flag(r.cond1_pass), flag(r.long_next),
               format_real(r.sup_default_target), join(r.N), join(r.alpha), format_real(r.alpha_max),
               format_real(r.decomposition_residual), format_real(r.c_measured), format_real(r.a_n),
               format_real(r.c0_increment), flag(r.c0_pass), format_real(r.c1_increment_g),
               format_real(r.c1_increment_euclid), format_real(r.cond3_rhs), format_real(r.cond3_ratio_g),
               format_real(r.cond3_ratio_euclid),
               r.cond3_ratio_euclid > r.cond3_ratio_g ? "euclid" : "g", flag(r.cond3_pass),
               format_real(r.triangle_lhs), format_real(r.triangle_rhs), flag(r.triangle_pass),
               flag(r.increment_bound_pass), flag(r.growth_bound_pass)});
  }
  return t.str();
}

std::string RunLedger::steps_csv() const {
  CsvTable t({"stage", "step", "ell_a", "ell_b", "N", "alpha_max", "eta_max", "sup_default", "c0_shift",
              "c1_shift", "identity_residual", "average_residual", "normal_L_residual",
              "normal_F_residual", "normal_F_tangency", "normal_L_tangency_scaled", "M", "K",
              "increment_margin", "increment_norm_margin", "growth_dF_margin", "growth_normal_margin",
              "increment_slack", "fd_consistency"});
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const int stage = s < rows.size() ? rows[s].n : static_cast<int>(s + 1);
    for (std::size_t j = 0; j < steps[s].size(); ++j) {
      const auto& r = steps[s][j];
      t.add_row({std::to_string(stage), std::to_string(j + 1), format_real(r.ell.a), format_real(r.ell.b),
                 std::to_string(r.N), format_real(r.alpha_max), format_real(r.eta_max),
                 format_real(r.measured_sup_default), format_real(r.c0_shift), format_real(r.c1_shift),
                 format_real(r.identity_residual), format_real(r.average_residual),
                 format_real(r.normal_L_residual), format_real(r.normal_F_residual),
                 format_real(r.normal_F_tangency), format_real(r.normal_L_tangency_scaled),
                 format_real(r.M), format_real(r.K), format_real(r.increment_margin),
                 format_real(r.increment_norm_margin), format_real(r.growth_dF_margin),
                 format_real(r.growth_normal_margin), format_real(r.increment_slack),
                 format_real(r.fd_consistency)});
    }
  }
  return t.str();
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::Config, what);
  };
  require(c.grid >= 3, "grid must be >= 3");
  require(c.stages >= 1, "stages must be >= 1");
  require(c.epsilon > 0.0, "epsilon must be positive");
  require(c.k >= 3, "k must be >= 3");
  require(c.quadrature_samples >= 1, "quadrature_samples must be >= 1");
  require(c.N0 >= 1, "N0 must be >= 1");
  require(c.N_cap >= c.N0, "N_cap must be >= N0");
  require(c.budget_fraction > 0.0 && c.budget_fraction <= 1.0, "budget_fraction must lie in (0, 1]");
  require(c.m_samples >= 2, "m_samples must be >= 2");
  require(c.m_inflation >= 1.0, "m_inflation must be >= 1");
  require(c.threads >= 0, "threads must be >= 0");
  scenario(c.scenario);
}

RunResult run_nash_kuiper(const RunConfig& config, const StageObserver& observer) {
  validate(config);
  if (config.threads > 0 && !std::getenv("LORENTZ_CORRUGATE_THREADS")) {
    set_worker_count(static_cast<std::size_t>(config.threads));
  }
  const std::filesystem::path outdir = config.outdir;
  const bool write = !config.outdir.empty();

  const Grid grid(config.grid);
  const Scenario& sc = scenario(config.scenario);
  RunResult res;
  res.initial = sc.initial(grid);
  const MetricField g = sc.target(grid);
  const MetricField delta = isometric_default(pullback_metric(res.initial), g);
  const FormDictionary dict = build_dictionary(config.k);
  const MSampling sampling{config.m_samples, config.m_inflation};

  res.constants = run_constants(res.initial, g, decompose(delta, dict), sampling);
  res.schedule = make_schedule(res.constants.K_tilde, config.stages, config.mode, config.epsilon);
  res.theoretical = make_schedule(res.constants.K_tilde, config.stages, ScheduleMode::Theoretical,
                                  config.epsilon);
  res.partial_sums.delta_norm = sup_norm(delta, g);
  const double root = std::sqrt(res.partial_sums.delta_norm);
  res.partial_sums.practical =
      root * make_schedule(res.constants.K_tilde, config.stages, ScheduleMode::Practical, config.epsilon)
                 .partial_sums.back();
  res.partial_sums.theoretical = root * res.theoretical.partial_sums.back();
  res.initial_default = res.partial_sums.delta_norm;

  const std::vector<MetricField> gs = stage_metrics(g, delta, res.schedule);

  if (write) {
    std::filesystem::create_directories(outdir);
    write_text_file(outdir / "config.resolved.json", resolved_config_json(config));

    const auto& c = res.constants;
    CsvTable constants({"name", "value"});
    constants.add_row({"alpha_max", format_real(c.alpha_max)});
    constants.add_row({"M", format_real(c.M)});
    constants.add_row({"M_samples", std::to_string(sampling.samples)});
    constants.add_row({"M_inflation", format_real(sampling.inflation)});
    constants.add_row({"K", format_real(c.K)});
    constants.add_row({"k", std::to_string(c.k)});
    constants.add_row({"K_tilde", format_real(c.K_tilde)});
    constants.add_row({"c", format_real(c.c)});
    constants.add_row({"T", format_real(c.T)});
    constants.add_row({"delta_norm", format_real(res.partial_sums.delta_norm)});
    constants.add_row({"rho", format_real(res.schedule.rho)});
    constants.add_row({"rho_theoretical", format_real(res.theoretical.rho)});
    constants.add_row({"budget_total", format_real(res.schedule.budget_total())});
    constants.add_row({"partial_sum_practical", format_real(res.partial_sums.practical)});
    constants.add_row({"partial_sum_theoretical", format_real(res.partial_sums.theoretical)});
    constants.write(outdir / "constants.csv");

    CsvTable sched({"n", "mode", "delta", "a_n", "term", "partial_sum", "term_ratio"});
    for (const Schedule* s : {&res.schedule, &res.theoretical}) {
      for (int n = 0; n <= s->stages; ++n) {
        sched.add_row({std::to_string(n), to_string(s->mode), format_real(s->deltas[n]), format_real(s->a[n]),
                       format_real(s->terms[n]), format_real(s->partial_sums[n]),
                       n >= 2 ? format_real(s->term_ratio(n)) : std::string()});
      }
    }
    sched.write(outdir / "schedule.csv");
    if (config.write_meshes) write_obj(outdir / stage_mesh_name(0), res.initial);
  }

  auto flush_ledger = [&] {
    if (!write) return;
    write_text_file(outdir / "ledger.csv", res.ledger.csv());
    write_text_file(outdir / "steps.csv", res.ledger.steps_csv());
  };

  StageOptions options;
  options.step.quadrature = {config.quadrature, config.quadrature_samples};
  options.step.m_sampling = sampling;
  options.limits.N0 = config.N0;
  options.limits.N_cap = config.N_cap;
  options.budget_fraction = config.budget_fraction;
  options.mode = config.mode;

  EmbeddingJet f = res.initial;
  for (int n = 1; n <= config.stages; ++n) {
    StageTargets t{n, res.schedule.deltas[n], &g, &gs[n - 1], &gs[n], &gs[n + 1], res.schedule.a[n]};
    StageResult stage;
    try {
      stage = run_stage(f, t, dict, res.constants, options);
    } catch (const Error& e) {
      StageRow failed;
      failed.n = n;
      failed.delta = t.delta;
      failed.a_n = t.a_n;
      failed.status = e.what();
      failed.increment_bound_pass = failed.growth_bound_pass = false;
      res.ledger.rows.push_back(failed);
      res.ledger.steps.emplace_back();
      flush_ledger();
      throw;
    }
    f = std::move(stage.jet);
    res.cumulative_c0 += stage.row.c0_increment;
    res.ledger.rows.push_back(stage.row);
    res.ledger.steps.push_back(std::move(stage.steps));
    if (write && config.write_meshes) write_obj(outdir / stage_mesh_name(n), f);
    flush_ledger();
    if (observer) observer(res.ledger.rows.back(), f);
  }

  res.final_default = sup_norm(pullback_metric(f) - g, g);
  res.drift = c0_distance(res.initial, f);
  res.jet = std::move(f);
  res.completed = true;
  return res;
}

}  // namespace lcorr
