#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lcorr/amplitude.hpp"
#include "lcorr/corrugation.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/scenarios.hpp"
#include "lcorr/scheduler.hpp"

using namespace lcorr;

namespace {

const Jacobian kFlat{{1, 0, 0}, {0, 1, 0}};

double sup_error(const MetricField& a, const MetricField& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, (a[k] - b[k]).max_abs_entry());
  return e;
}

// Midpoint rule for the mean of gamma over one period.
Vec3M oracle_average(const LoopNode& node, int n = 2048) {
  Vec3M s;
  for (int i = 0; i < n; ++i) s += node.gamma((i + 0.5) / n);
  return (1.0 / n) * s;
}

PrimitiveMetric strip_mu(const Grid& g) { return *scenario("strip-primitive").primitive(g); }

}  // namespace

TEST_CASE("loop node on the flat strip") {
  const LoopNode node = make_loop_node(kFlat, 0.5, {1.0, 0.0});
  CHECK(node.r == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::cyl_bessel_i(0.0, node.alpha) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(node.alpha == doctest::Approx(1.2282198518).epsilon(1e-9));
  const Vec3M g0 = loop_gamma(node, 0.0);
  const double a = node.alpha;
  CHECK(euclidean_norm(g0 - std::sqrt(0.5) * Vec3M{std::cosh(a), 0, std::sinh(a)}) <= 1e-15);
  CHECK(g0.x == doctest::Approx(1.3109611313).epsilon(1e-9));
  CHECK(g0.z == doctest::Approx(1.1039108152).epsilon(1e-9));
  CHECK(euclidean_norm(loop_gamma(node, 0.25) - node.r * node.frame.t) <= 1e-15);
  // Every loop point is h-spacelike of length r.
  for (double s : {0.0, 0.1, 0.37, 0.8}) {
    CHECK(minkowski_inner(node.gamma(s), node.gamma(s)) == doctest::Approx(0.5));
  }
}

TEST_CASE("idle loop node") {
  const LoopNode node = make_loop_node(kFlat, 0.0, {1.0, 0.0});
  CHECK(node.idle());
  CHECK(node.alpha == 0.0);
  CHECK(node.r == 1.0);
  for (double s : {0.0, 0.3, 0.9}) CHECK(loop_gamma(node, s) == node.frame.t);
  CHECK(loop_average(node) == node.frame.t);
  CHECK(node.primitive(0.7) == Vec3M{});
  CHECK(target_differential(kFlat, node, {1.0, 0.0}, 0.4) == kFlat);
}

TEST_CASE("loop average equals t / dl(u)") {
  const Grid g(17);
  const auto f = bent_strip(g);
  for (double th : {0.0, 0.7, 2.0}) {
    const LinearForm ell = LinearForm::from_angle(th);
    for (std::size_t k = 0; k < g.size(); k += 7) {
      const LoopNode node = make_loop_node(f.differential[k], 0.4, ell);
      const Vec3M expect = (1.0 / node.dl_u()) * node.frame.t;
      CHECK(euclidean_norm(loop_average(node) - expect) <= 1e-10);
      CHECK(euclidean_norm(oracle_average(node) - expect) <= 1e-10);
      CHECK(std::abs(node.r * phi(node.alpha) - 1.0 / node.dl_u()) <= 1e-10);
    }
  }
}

TEST_CASE("make_loop_node rejects non Riemannian targets") {
  bool raised = false;
  try {
    make_loop_node(kFlat, 1.2, {1.0, 0.0});
  } catch (const Error& e) {
    raised = e.kind() == ErrorKind::NotRiemannian;
  }
  CHECK(raised);
}

TEST_CASE("primitive is periodic and matches the unreduced integral") {
  const LoopNode node = make_loop_node({{1, 0, 0.3}, {0.1, 1, 0}}, 0.45, LinearForm::from_angle(0.6));
  CHECK(euclidean_norm(node.primitive(0.0)) <= 1e-15);
  CHECK(euclidean_norm(node.primitive(1.0)) <= 1e-14);
  for (double s : {0.13, 0.5, 0.91}) {
    const Vec3M a = node.primitive(s);
    CHECK(euclidean_norm(node.primitive(s + 3.0) - a) <= 1e-13);
    CHECK(euclidean_norm(node.primitive(s - 2.0) - a) <= 1e-13);
    CHECK(euclidean_norm(node.primitive_unreduced(s + 17.0, 64) - a) <= 1e-10);
    // The trapezoid primitive is second order in the panel width; at s = 1/2
    // the end slopes match and it is exact to rounding.
    const double e256 = euclidean_norm(node.primitive(s, {Quadrature::Trapezoid, 256}) - a);
    const double e512 = euclidean_norm(node.primitive(s, {Quadrature::Trapezoid, 512}) - a);
    CHECK(e256 <= 1e-4);
    if (s != 0.5) CHECK(e256 / e512 == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("normal of the loop") {
  const LoopNode node = make_loop_node({{1, 0, 0.3}, {0.1, 1, 0}}, 0.45, {1.0, 0.0});
  for (double s : {0.0, 0.2, 0.55}) {
    const Vec3M n = node.normal_L(s);
    CHECK(minkowski_inner(n, n) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(minkowski_inner(n, node.gamma(s))) <= 1e-12);
    CHECK(std::abs(minkowski_inner(n, node.frame.vhat)) <= 1e-12);
    CHECK(n.z > 0.0);
  }
}

TEST_CASE("target differential pulls back to mu") {
  const Grid g(17);
  SUBCASE("flat strip") {
    const auto f = EmbeddingJet::flat_inclusion(g);
    const PrimitiveMetric mu{ScalarField(g, 0.5), {1.0, 0.0}};
    const auto params = prepare_step(f, mu, 40);
    const auto L = target_differential(f, params);
    MetricField pb(g);
    for (std::size_t k = 0; k < g.size(); ++k) pb[k] = pullback(L[k]);
    CHECK(sup_error(pb, constant_metric(g, {0.5, 0, 1})) <= 1e-10);
  }
  SUBCASE("bent strip, oblique form") {
    const auto f = bent_strip(g);
    const PrimitiveMetric mu{ScalarField(g, 0.3), LinearForm::from_angle(0.8)};
    const auto params = prepare_step(f, mu, 40);
    const auto L = target_differential(f, params);
    const auto target = primitive_target(f, mu);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK((pullback(L[k]) - target[k]).max_abs_entry() <= 1e-10);
      const auto& v = params.nodes[k].frame.v;
      CHECK(euclidean_norm(L[k].apply(v[0], v[1]) - f.differential[k].apply(v[0], v[1])) <= 1e-15);
    }
  }
}

TEST_CASE("zero eta leaves the embedding untouched") {
  const Grid g(17);
  const auto f = bent_strip(g);
  const StepResult r = cp_step(f, {ScalarField(g, 0.0), {1.0, 0.0}}, 40);
  CHECK(r.jet.position == f.position);
  CHECK(r.record.c0_shift == 0.0);
}

TEST_CASE("metric error decays like 1/N") {
  const Grid g(65);
  const auto f = bent_strip(g);
  const auto mu = strip_mu(g);
  StepOptions opt;
  opt.audit = false;
  const double e40 = cp_step(f, mu, 40, opt).record.measured_sup_default;
  const double e80 = cp_step(f, mu, 80, opt).record.measured_sup_default;
  MESSAGE("e(40) = " << e40 << ", C = " << 40 * e40 << ", ratio = " << e40 / e80);
  CHECK(e40 / e80 >= 1.6);
  CHECK(e40 / e80 <= 2.4);
}

TEST_CASE("compactly supported eta glues to f on the collar") {
  const Grid g(65);
  const auto f = bent_strip(g);
  const PrimitiveMetric mu{collar_bump(g, 0.1, 0.5), {1.0, 0.0}};
  const auto r = cp_step(f, mu, 40);
  int collar = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mu.eta[k] != 0.0) continue;
    ++collar;
    CHECK(r.jet.position[k] == f.position[k]);
  }
  CHECK(collar > 0);
}

TEST_CASE("step record on the strip") {
  const Grid g(33);
  const auto r = cp_step(bent_strip(g), strip_mu(g), 40).record;
  CHECK(r.N == 40);
  CHECK(r.identity_residual <= 1e-9);
  CHECK(r.average_residual <= 1e-10);
  CHECK(r.normal_F_residual <= 1e-8);
  CHECK(r.normal_F_tangency <= 10.0 / 40);
  CHECK(r.increment_bound_pass());
  CHECK(r.growth_bound_pass());
  CHECK(r.alpha_max == doctest::Approx(amplitude(radial_factor(0.5, 1.0), 1.0)));
}

TEST_CASE("corrugation number selection") {
  // 37 nodes keep the dyadic N from landing every node on a whole or half period.
  const Grid g(37);
  const auto f = bent_strip(g);
  SUBCASE("idle step accepts N0") {
    const auto sel = select_corrugation_number(f, {ScalarField(g, 0.0), {1.0, 0.0}}, 1e-6, nullptr);
    CHECK(sel.N == 16);
    CHECK(sel.attempts == 1);
  }
  SUBCASE("halving epsilon never lowers N") {
    const auto mu = strip_mu(g);
    const auto a = select_corrugation_number(f, mu, 0.01, nullptr);
    const auto b = select_corrugation_number(f, mu, 0.005, nullptr);
    CHECK(a.step.record.measured_sup_default <= 0.01);
    CHECK(b.N >= a.N);
  }
  SUBCASE("unreachable epsilon") {
    bool raised = false;
    try {
      select_corrugation_number(f, strip_mu(g), 1e-15, nullptr);
    } catch (const Error& e) {
      raised = e.kind() == ErrorKind::BudgetExceeded;
    }
    CHECK(raised);
  }
}

TEST_CASE("successive steps") {
  const Grid g(33);
  const auto f = EmbeddingJet::flat_inclusion(g);
  const auto dict = build_dictionary(3);
  SUBCASE("all eta zero") {
    const auto dec = decompose(constant_metric(g, {}), dict);
    const auto out = successive_cp(f, dec, 1e-3);
    CHECK(out.jet.position == f.position);
    CHECK(out.records.size() == 3);
  }
  SUBCASE("flat square shrink") {
    const MetricField delta = constant_metric(g, {0.5, 0, 0.5});
    const MetricField target = constant_metric(g, {0.5, 0, 0.5});
    const auto dec = decompose(delta, dict);
    StepOptions opt;
    opt.norm_metric = &target;
    const double eps = 0.02;
    const auto out = successive_cp(f, dec, eps, opt);
    const double err = operator_norm_form(pullback_metric(out.jet) - target, target);
    MESSAGE("final error " << err << " against " << 3 * eps);
    CHECK(err <= 3 * eps);
    // Steps 2 and 3 see F*h off by the errors already made, at most 2 eps in g.
    const auto bound = run_constants(f, target, dec, {}, 2 * eps);
    REQUIRE(out.records.size() == 3);
    for (const auto& r : out.records) CHECK(r.alpha_max <= bound.alpha_max * (1 + 1e-12));
  }
}
