#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lcorr/amplitude.hpp"
#include "lcorr/bounds.hpp"
#include "lcorr/config.hpp"
#include "lcorr/corrugation.hpp"
#include "lcorr/decomp.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/io.hpp"
#include "lcorr/parallel.hpp"
#include "lcorr/scenarios.hpp"
#include "lcorr/scheduler.hpp"
#include "lcorr/verify.hpp"

namespace fs = std::filesystem;
using namespace lcorr;

namespace {

constexpr const char* kVersion = "0.1.0";

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::UnknownScenario:
      return 2;
    default:
      return 1;
  }
}

LinearForm parse_ell(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::Config, "--ell expects \"a,b\", got '" + text + "'");
  try {
    const double a = std::stod(text.substr(0, comma));
    const double b = std::stod(text.substr(comma + 1));
    return LinearForm::normalized(a, b);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Config, "--ell expects two numbers, got '" + text + "'");
  }
}

std::string row(const char* name, double value) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "  %-10s %.17g\n", name, value);
  return buf;
}

// -- bounds -------------------------------------------------------------------

struct BoundsArgs {
  double alpha_max = 1.0;
  int k = 5;
  std::string csv;
};

int cmd_bounds(const BoundsArgs& a) {
  if (!(a.alpha_max >= 0.0)) throw Error(ErrorKind::Config, "--alpha-max must be >= 0");
  if (a.k < 1) throw Error(ErrorKind::Config, "--k must be >= 1");
  const BoundConstants c = bound_constants(a.alpha_max, a.k);
  const double psi_at = a.alpha_max > 0.0 ? psi(a.alpha_max) : psi_limit();
  std::cout << "bound constants\n"
            << row("alpha_max", c.alpha_max) << row("M", c.M) << row("K", c.K)
            << "  k          " << c.k << "\n"
            << row("K_tilde", c.K_tilde) << row("psi", psi_at)
            << row("psi1", psi1(a.alpha_max)) << row("psi2", psi2(a.alpha_max))
            << row("psi(0+)", psi_limit()) << row("psi1(0+)", kPsi1Limit) << row("psi2(0+)", kPsi2Limit);
  if (!a.csv.empty()) {
    CsvTable t({"alpha_max", "M", "K", "k", "K_tilde", "psi", "psi1", "psi2"});
    t.add_row({format_real(c.alpha_max), format_real(c.M), format_real(c.K), std::to_string(c.k),
               format_real(c.K_tilde), format_real(psi_at), format_real(psi1(a.alpha_max)),
               format_real(psi2(a.alpha_max))});
    t.write(a.csv);
  }
  return 0;
}

// -- decompose ----------------------------------------------------------------

struct DecomposeArgs {
  std::string metric_file;
  int k = 5;
  std::string outdir = ".";
};

int cmd_decompose(const DecomposeArgs& a) {
  const MetricField delta = read_metric_csv(a.metric_file);
  const FormDictionary dict = build_dictionary(a.k);
  const PrimitiveDecomposition d = decompose(delta, dict);
  const fs::path out = a.outdir;
  fs::create_directories(out);

  CsvTable forms({"index", "angle", "a", "b", "file"});
  for (std::size_t j = 0; j < d.forms.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "eta_%02zu.csv", j + 1);
    write_scalar_csv(out / name, d.eta[j], "eta");
    forms.add_row({std::to_string(j + 1), format_real(dict.angles[j]), format_real(d.forms[j].a),
                   format_real(d.forms[j].b), name});
  }
  forms.write(out / "forms.csv");
  std::printf("decomposed %dx%d field over %zu forms\n  residual   %.3e\n  max jump   %.3e\n",
              delta.grid.nx(), delta.grid.ny(), d.forms.size(), d.residual, max_coefficient_jump(d));
  return 0;
}

// -- corrugate ----------------------------------------------------------------

struct CorrugateArgs {
  std::string scenario = "strip-primitive";
  std::string eta_file;
  std::optional<double> eta;
  std::string ell;
  std::optional<int> N;
  std::optional<double> eps;
  int grid = 65;
  std::string out;
  std::string record;
  std::string quadrature = "bessel";
  int samples = 64;
  int N_cap = 1 << 20;
};

int cmd_corrugate(const CorrugateArgs& a) {
  if (a.N.has_value() == a.eps.has_value()) throw Error(ErrorKind::Config, "give exactly one of --N and --eps");
  if (!a.eta_file.empty() && a.eta) throw Error(ErrorKind::Config, "give at most one of --eta-file and --eta");

  const Scenario& sc = scenario(a.scenario);
  ScalarField eta;
  if (!a.eta_file.empty()) {
    eta = read_scalar_csv(a.eta_file);
  } else {
    const Grid g(a.grid);
    if (a.eta) {
      eta = ScalarField(g, *a.eta);
    } else if (auto p = sc.primitive(g)) {
      eta = p->eta;
    } else {
      throw Error(ErrorKind::Config, "scenario '" + a.scenario + "' has no primitive; pass --eta or --eta-file");
    }
  }
  const Grid grid = eta.grid;
  LinearForm ell{1.0, 0.0};
  if (!a.ell.empty()) {
    ell = parse_ell(a.ell);
  } else if (auto p = sc.primitive(grid)) {
    ell = p->ell;
  }
  const PrimitiveMetric mu{eta, ell};
  const EmbeddingJet f = sc.initial(grid);

  StepOptions opt;
  opt.quadrature = {parse_quadrature(a.quadrature), a.samples};
  StepResult step;
  if (a.N) {
    step = cp_step(f, mu, *a.N, opt);
  } else {
    SelectionLimits lim;
    lim.N_cap = a.N_cap;
    step = select_corrugation_number(f, mu, *a.eps, nullptr, opt, lim).step;
  }
  const auto& r = step.record;
  std::printf("corrugation step on %dx%d, l = (%.6g, %.6g)\n", grid.nx(), grid.ny(), ell.a, ell.b);
  std::printf("  N                 %d\n  alpha_max         %.6g\n  sup default       %.6e\n"
              "  C0 shift          %.6e\n  C1 shift          %.6e\n  identity residual %.3e\n"
              "  increment bound   %s\n  growth bound      %s\n",
              r.N, r.alpha_max, r.measured_sup_default, r.c0_shift, r.c1_shift, r.identity_residual,
              r.increment_bound_pass() ? "pass" : "fail", r.growth_bound_pass() ? "pass" : "fail");
  if (!a.out.empty()) write_obj(a.out, step.jet);
  if (!a.record.empty()) {
    RunLedger ledger;
    ledger.rows.emplace_back().n = 1;
    ledger.steps.push_back({r});
    write_text_file(a.record, ledger.steps_csv());
  }
  return 0;
}

// -- run ------------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string outdir;
};

int cmd_run(const RunArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (!a.outdir.empty()) cfg.outdir = a.outdir;
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("run %s: %d %s stages on %dx%d, k = %d, epsilon = %g\n", cfg.scenario.c_str(), cfg.stages,
              to_string(cfg.mode), cfg.grid, cfg.grid, cfg.k, cfg.epsilon);
  const RunResult res = run_nash_kuiper(cfg, [&](const StageRow& r, const EmbeddingJet&) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  stage %2d  default %.4e / %.4e (%s)  to target %.4e  C0 %.3e  [%.1fs]\n", r.n,
                r.sup_default, r.cond1_rhs, r.cond1_pass ? "pass" : "fail", r.sup_default_target,
                r.c0_increment, secs);
    std::fflush(stdout);
  });
  std::printf("initial default      %.6e\nfinal default        %.6e\ncumulative C0 drift  %.6e (budget %.6e)\n"
              "partial sum (%s)  %.6e\npartial sum (theoretical schedule)  %.6e\n",
              res.initial_default, res.final_default, res.drift, res.schedule.budget_total(),
              to_string(cfg.mode), res.partial_sums.practical, res.partial_sums.theoretical);
  return 0;
}

// -- info -----------------------------------------------------------------------

int cmd_info() {
  std::printf("lorentz-corrugate %s\nworkers: %zu\nscenarios:\n", kVersion, worker_count());
  for (const auto& id : scenario_ids()) std::printf("  %-16s %s\n", id.c_str(), scenario(id).description.c_str());
  std::printf("default run config:\n%s", resolved_config_json(RunConfig{}).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corrugation engine for spacelike surfaces in Minkowski 3-space"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "print the bound constants for (alpha_max, k)");
  bounds->add_option("--alpha-max", bounds_args.alpha_max, "largest amplitude")->capture_default_str();
  bounds->add_option("--k", bounds_args.k, "number of forms")->capture_default_str();
  bounds->add_option("--csv", bounds_args.csv, "also write the table as CSV");

  DecomposeArgs dec_args;
  auto* dec = app.add_subcommand("decompose", "split a default field into primitive metrics");
  dec->add_option("--metric-file", dec_args.metric_file, "CSV with x_idx,y_idx,E,F,G")->required();
  dec->add_option("--k", dec_args.k, "dictionary size")->capture_default_str();
  dec->add_option("--outdir", dec_args.outdir, "where eta_##.csv and forms.csv go")->capture_default_str();

  CorrugateArgs cor_args;
  auto* cor = app.add_subcommand("corrugate", "apply one corrugation step");
  cor->add_option("--scenario", cor_args.scenario, "initial embedding")->capture_default_str();
  cor->add_option("--eta-file", cor_args.eta_file, "CSV with x_idx,y_idx,eta");
  cor->add_option("--eta", cor_args.eta, "constant coefficient");
  cor->add_option("--ell", cor_args.ell, "linear form \"a,b\"");
  cor->add_option("--N", cor_args.N, "corrugation number");
  cor->add_option("--eps", cor_args.eps, "select N so the default is at most eps");
  cor->add_option("--grid", cor_args.grid, "nodes per side when no eta file is given")->capture_default_str();
  cor->add_option("--out", cor_args.out, "OBJ mesh of the result");
  cor->add_option("--record", cor_args.record, "CSV step record");
  cor->add_option("--quadrature", cor_args.quadrature, "bessel or trapezoid")->capture_default_str();
  cor->add_option("--samples", cor_args.samples, "trapezoid samples per period")->capture_default_str();
  cor->add_option("--N-cap", cor_args.N_cap, "largest N tried with --eps")->capture_default_str();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run the staged iteration");
  run->add_option("--config", run_args.config, "JSON run configuration");
  run->add_option("--outdir", run_args.outdir, "output directory (overrides the config)");

  std::string level = "quick";
  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  ver->add_option("level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}))->capture_default_str();

  auto* info = app.add_subcommand("info", "version, scenarios and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bounds) return cmd_bounds(bounds_args);
    if (*dec) return cmd_decompose(dec_args);
    if (*cor) return cmd_corrugate(cor_args);
    if (*run) return cmd_run(run_args);
    if (*info) return cmd_info();
    if (*ver) {
      const auto t0 = std::chrono::steady_clock::now();
      const VerifyReport report = verify(level == "full" ? VerifyLevel::Full : VerifyLevel::Quick);
      std::cout << report.text();
      std::printf("elapsed %.1fs\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      return report.all_passed() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
