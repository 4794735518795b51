#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lcorr/bounds.hpp"
#include "lcorr/corrugation.hpp"
#include "lcorr/decomp.hpp"
#include "lcorr/fields.hpp"

namespace lcorr {

enum class ScheduleMode { Theoretical, Practical };

const char* to_string(ScheduleMode mode);
/// "theoretical" or "practical"; throws Error{Config} otherwise.
ScheduleMode parse_schedule_mode(const std::string& s);

/// Target sequence g_n = g + delta_n Delta for n = 0 .. stages + 1 (stage n
/// needs g_{n+1} for its stopping rule) together with the C0 budgets a_n and
/// the summability terms sqrt(delta_{n-1} - delta_n) (2 K_tilde)^n.
///
/// Every per-stage vector is indexed by n directly; entry 0 of `a`, `terms`
/// and `partial_sums` is 0.
struct Schedule {
  ScheduleMode mode = ScheduleMode::Practical;
  int stages = 0;
  double K_tilde = 0.0;
  /// delta_n = rho^n in theoretical mode, 1/2 in practical mode.
  double rho = 0.5;
  double epsilon = 0.05;

  std::vector<double> deltas;
  std::vector<double> a;
  std::vector<double> terms;
  std::vector<double> log_terms;
  std::vector<double> partial_sums;

  /// terms[n] / terms[n - 1] for n >= 2, computed from the logarithms.
  double term_ratio(int n) const;
  double budget_total() const;
};

/// Theoretical mode picks rho with sqrt(rho) 2 K_tilde just below 0.9, so the
/// terms form a geometric tail of ratio 0.9. Practical mode halves delta each
/// stage and only reports the terms. a_n = epsilon 2^{-n-1}.
/// Throws Error{Config} for stages < 1 or nonpositive K_tilde / epsilon.
Schedule make_schedule(double K_tilde, int stages, ScheduleMode mode, double epsilon = 0.05);

/// g_n for n = 0 .. schedule.deltas.size() - 1.
std::vector<MetricField> stage_metrics(const MetricField& g, const MetricField& delta_field,
                                       const Schedule& schedule);

/// Sup-node operator norm of a form field with respect to g.
double sup_norm(const MetricField& form, const MetricField& g);

struct StageRow {
  int n = 0;
  double delta = 0.0;
  std::string status = "ok";

  /// |f_n*h - g_n| against |g_{n+1} - g_n|, condition (1).
  double sup_default = 0.0;
  double cond1_rhs = 0.0;
  bool cond1_pass = false;
  /// f_n*h - g_{n+1} is positive semidefinite.
  bool long_next = false;
  /// |f_n*h - g|, the distance to the final target.
  double sup_default_target = 0.0;

  std::vector<int> N;
  std::vector<double> alpha;
  double alpha_max = 0.0;
  double decomposition_residual = 0.0;
  double c_measured = 0.0;

  double a_n = 0.0;
  double c0_increment = 0.0;
  bool c0_pass = false;
  /// sup |df_n - df_{n-1}| with the g-operator norm and with the Euclidean one.
  double c1_increment_g = 0.0;
  double c1_increment_euclid = 0.0;
  /// a_n + T |g_n - g_{n-1}|^{1/2} (2 K_tilde)^n.
  double cond3_rhs = 0.0;
  double cond3_ratio_g = 0.0;
  double cond3_ratio_euclid = 0.0;
  bool cond3_pass = false;

  /// |f_{n-1}*h - g_n|^{1/2} <= 2 |g_n - g_{n-1}|^{1/2}.
  double triangle_lhs = 0.0;
  double triangle_rhs = 0.0;
  bool triangle_pass = false;

  bool increment_bound_pass = true;
  bool growth_bound_pass = true;
};

struct RunLedger {
  std::vector<StageRow> rows;
  /// Per-stage corrugation step records, parallel to `rows`.
  std::vector<std::vector<CorrugationStepRecord>> steps;

  std::string csv() const;
  std::string steps_csv() const;
};

struct StageOptions {
  StepOptions step;
  SelectionLimits limits;
  /// Share of the condition (1) right-hand side handed to the steps. Step j
  /// of k gets (fraction * rhs - errors so far) / (k - j).
  double budget_fraction = 0.5;
  ScheduleMode mode = ScheduleMode::Practical;
};

/// Metrics seen by stage n.
struct StageTargets {
  int n = 1;
  double delta = 0.0;
  const MetricField* g = nullptr;
  const MetricField* g_prev = nullptr;
  const MetricField* g_n = nullptr;
  const MetricField* g_next = nullptr;
  double a_n = 0.0;
};

struct StageResult {
  EmbeddingJet jet;
  StageRow row;
  std::vector<CorrugationStepRecord> steps;
};

/// Decomposes D_n = f_prev*h - g_n over the dictionary and corrugates once per
/// form, choosing each N so that the output meets condition (1) against
/// g_next, moves points by at most a_n and stays long for g_next.
/// Throws NotLong (before any corrugation), ConeViolation or BudgetExceeded.
StageResult run_stage(const EmbeddingJet& f_prev, const StageTargets& targets,
                      const FormDictionary& dict, const BoundConstants& constants,
                      const StageOptions& options = {});

/// Everything that defines a run. Serialised in full next to its outputs.
struct RunConfig {
  int grid = 257;
  int stages = 6;
  ScheduleMode mode = ScheduleMode::Practical;
  double epsilon = 0.05;
  int k = 5;
  std::string scenario = "flat-shrink";
  std::string outdir;
  Quadrature quadrature = Quadrature::BesselSeries;
  int quadrature_samples = 64;
  int N0 = 16;
  int N_cap = 1 << 24;
  double budget_fraction = 0.5;
  int m_samples = 4096;
  double m_inflation = 1.01;
  /// 0 keeps the machine default.
  int threads = 0;
  bool write_meshes = true;
};

/// Throws Error{Config} for out-of-range fields or an unknown scenario.
void validate(const RunConfig& config);

struct PartialSumReport {
  double delta_norm = 0.0;
  /// |Delta|^{1/2} sum_n sqrt(delta_{n-1} - delta_n) (2 K_tilde)^n.
  double practical = 0.0;
  double theoretical = 0.0;
};

struct RunResult {
  EmbeddingJet initial;
  EmbeddingJet jet;
  BoundConstants constants;
  Schedule schedule;
  Schedule theoretical;
  RunLedger ledger;
  double initial_default = 0.0;
  double final_default = 0.0;
  double cumulative_c0 = 0.0;
  double drift = 0.0;
  PartialSumReport partial_sums;
  bool completed = false;
};

/// Called after every finished stage with the jet it produced.
using StageObserver = std::function<void(const StageRow&, const EmbeddingJet&)>;

/// A priori constants for a run: alpha_max from the decomposition of Delta,
/// step j measured against f0*h minus the primitives before it (and minus
/// metric_slack g, room for the errors of earlier steps); M, K, K_tilde for
/// the dictionary size, c from the same decomposition and T.
BoundConstants run_constants(const EmbeddingJet& f0, const MetricField& g,
                             const PrimitiveDecomposition& decomp, const MSampling& sampling,
                             double metric_slack = 0.0);

/// Runs the stages in order. With a nonempty outdir it writes
/// config.resolved.json, constants.csv, stage_000.obj (the input) and, after
/// each stage, stage_###.obj, ledger.csv and steps.csv. A failing stage gets a
/// ledger row carrying the error before the error is rethrown.
RunResult run_nash_kuiper(const RunConfig& config, const StageObserver& observer = {});

}  // namespace lcorr
