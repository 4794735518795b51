#pragma once

#include <filesystem>
#include <string>

#include "lcorr/scheduler.hpp"

namespace lcorr {

/// Parses a run configuration. Missing keys keep their defaults; unknown keys
/// and wrongly typed values raise Error{Config}.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Every field, including defaults, as pretty-printed JSON.
std::string resolved_config_json(const RunConfig& config);

const char* to_string(Quadrature q);
Quadrature parse_quadrature(const std::string& s);

}  // namespace lcorr
