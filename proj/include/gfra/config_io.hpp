#pragma once

#include "gfra/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace gfra {

// Config files are JSON objects with four sections (system, scenario, link,
// solver). Keys that are absent keep the value of the base config; unknown
// keys are rejected. See README.md for the full schema.

nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig config_from_json(const nlohmann::json& doc, const SystemConfig& base = {});

SystemConfig load_config(const std::filesystem::path& path, const SystemConfig& base = {});
void save_config(const SystemConfig& cfg, const std::filesystem::path& path);

}  // namespace gfra
