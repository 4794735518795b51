#include "lcorr/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcorr/errors.hpp"

namespace lcorr {
namespace {

using nlohmann::ordered_json;

template <class T>
void read_key(const ordered_json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const ordered_json::exception&) {
    throw Error(ErrorKind::Config, std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

const char* to_string(Quadrature q) {
  return q == Quadrature::Trapezoid ? "trapezoid" : "bessel";
}

Quadrature parse_quadrature(const std::string& s) {
  if (s == "bessel") return Quadrature::BesselSeries;
  if (s == "trapezoid") return Quadrature::Trapezoid;
  throw Error(ErrorKind::Config, "quadrature must be 'bessel' or 'trapezoid', got '" + s + "'");
}

RunConfig parse_run_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");

  static const char* const known[] = {
      "grid", "stages", "mode", "epsilon", "k", "scenario", "outdir", "quadrature",
      "quadrature_samples", "N0", "N_cap", "budget_fraction", "m_samples", "m_inflation",
      "threads", "write_meshes"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw Error(ErrorKind::Config, "unknown config key '" + item.key() + "'");
  }

  RunConfig c;
  read_key(j, "grid", c.grid);
  read_key(j, "stages", c.stages);
  std::string mode = to_string(c.mode);
  read_key(j, "mode", mode);
  c.mode = parse_schedule_mode(mode);
  read_key(j, "epsilon", c.epsilon);
  read_key(j, "k", c.k);
  read_key(j, "scenario", c.scenario);
  read_key(j, "outdir", c.outdir);
  std::string quad = to_string(c.quadrature);
  read_key(j, "quadrature", quad);
  c.quadrature = parse_quadrature(quad);
  read_key(j, "quadrature_samples", c.quadrature_samples);
  read_key(j, "N0", c.N0);
  read_key(j, "N_cap", c.N_cap);
  read_key(j, "budget_fraction", c.budget_fraction);
  read_key(j, "m_samples", c.m_samples);
  read_key(j, "m_inflation", c.m_inflation);
  read_key(j, "threads", c.threads);
  read_key(j, "write_meshes", c.write_meshes);
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string resolved_config_json(const RunConfig& c) {
  ordered_json j;
  j["grid"] = c.grid;
  j["stages"] = c.stages;
  j["mode"] = to_string(c.mode);
  j["epsilon"] = c.epsilon;
  j["k"] = c.k;
  j["scenario"] = c.scenario;
  j["outdir"] = c.outdir;
  j["quadrature"] = to_string(c.quadrature);
  j["quadrature_samples"] = c.quadrature_samples;
  j["N0"] = c.N0;
  j["N_cap"] = c.N_cap;
  j["budget_fraction"] = c.budget_fraction;
  j["m_samples"] = c.m_samples;
  j["m_inflation"] = c.m_inflation;
  j["threads"] = c.threads;
  j["write_meshes"] = c.write_meshes;
  return j.dump(2) + "\n";
}

}  // namespace lcorr
