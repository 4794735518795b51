#include "lcorr/scenarios.hpp"

#include <cmath>

#include "lcorr/errors.hpp"

namespace lcorr {
namespace {

std::vector<Scenario> make_registry() {
  std::vector<Scenario> out;

  out.push_back({"flat-shrink",
                 "flat inclusion (x, y, 0) shrunk to g = 0.5 (dx^2 + dy^2)",
                 [](const Grid& g) { return EmbeddingJet::flat_inclusion(g); },
                 [](const Grid& g) { return constant_metric(g, {0.5, 0.0, 0.5}); },
                 [](const Grid&) { return std::optional<PrimitiveMetric>{}; }});

  out.push_back({"aniso-shrink",
                 "flat inclusion (x, y, 0) shrunk to g = 0.6 dx^2 + 0.8 dy^2",
                 [](const Grid& g) { return EmbeddingJet::flat_inclusion(g); },
                 [](const Grid& g) { return constant_metric(g, {0.6, 0.0, 0.8}); },
                 [](const Grid&) { return std::optional<PrimitiveMetric>{}; }});

  out.push_back({"strip-primitive",
                 "bent strip with induced metric dx^2 + dy^2, target mu = f*h - 0.5 dx^2",
                 [](const Grid& g) { return bent_strip(g); },
                 [](const Grid& g) { return constant_metric(g, {0.5, 0.0, 1.0}); },
                 [](const Grid& g) {
                   return std::optional<PrimitiveMetric>{PrimitiveMetric{ScalarField(g, 0.5), {1.0, 0.0}}};
                 }});
  return out;
}

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> r = make_registry();
  return r;
}

double smooth_step(double t) {
  // exp(-1/t) based transition, 0 for t <= 0 and 1 for t >= 1.
  auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = psi(t);
  const double b = psi(1.0 - t);
  return a / (a + b);
}

}  // namespace

const Scenario& scenario(const std::string& id) {
  for (const auto& s : registry()) {
    if (s.id == id) return s;
  }
  throw Error(ErrorKind::UnknownScenario, "no scenario named '" + id + "'");
}

std::vector<std::string> scenario_ids() {
  std::vector<std::string> ids;
  for (const auto& s : registry()) ids.push_back(s.id);
  return ids;
}

EmbeddingJet bent_strip(const Grid& g, double bend) {
  return EmbeddingJet::sample(
      g,
      [bend](double x, double y) {
        const double w = bend * (y - 0.5);
        return Vec3M{x, std::sinh(w) / bend, (std::cosh(w) - 1.0) / bend};
      },
      [](double, double) { return Vec3M{1.0, 0.0, 0.0}; },
      [bend](double, double y) {
        const double w = bend * (y - 0.5);
        return Vec3M{0.0, std::cosh(w), std::sinh(w)};
      });
}

ScalarField collar_bump(const Grid& g, double collar, double peak) {
  ScalarField out(g);
  const double width = 0.5 - collar;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      // Distance from the boundary, rescaled so the ramp spans [collar, 1/2].
      const double dx = std::min(g.x(i), 1.0 - g.x(i));
      const double dy = std::min(g.y(j), 1.0 - g.y(j));
      const double bx = dx <= collar ? 0.0 : smooth_step((dx - collar) / width);
      const double by = dy <= collar ? 0.0 : smooth_step((dy - collar) / width);
      out[g.index(i, j)] = peak * bx * by;
    }
  }
  return out;
}

}  // namespace lcorr
