#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcorr/corrugation.hpp"
#include "lcorr/fields.hpp"

namespace lcorr {

/// A built-in problem: an initial spacelike embedding that is long for the
/// target metric.
struct Scenario {
  std::string id;
  std::string description;
  std::function<EmbeddingJet(const Grid&)> initial;
  std::function<MetricField(const Grid&)> target;
  /// Present for single-primitive scenarios: target = initial*h - eta dl^2.
  std::function<std::optional<PrimitiveMetric>(const Grid&)> primitive;
};

/// Registered ids: flat-shrink, aniso-shrink, strip-primitive.
/// Throws Error{UnknownScenario}.
const Scenario& scenario(const std::string& id);
std::vector<std::string> scenario_ids();

/// Bending rate of the strip-primitive profile.
inline constexpr double kStripBend = 1.0;

/// (x, sinh(k (y - 1/2)) / k, (cosh(k (y - 1/2)) - 1) / k): a strip ruled along
/// x whose y-profile is a unit-speed spacelike hyperbola, so its induced metric
/// is exactly dx^2 + dy^2 while its normal turns with y.
EmbeddingJet bent_strip(const Grid& g, double bend = kStripBend);

/// C-infinity bump: 0 within `collar` of the boundary of [0,1]^2, `peak` at
/// the centre.
ScalarField collar_bump(const Grid& g, double collar, double peak);

}  // namespace lcorr
