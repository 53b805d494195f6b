#pragma once

#include "json.hpp"

#include "joss/pipeline.hpp"

// JSON adapters for the config structs. Missing keys keep their defaults, so
// partial override files work.

namespace joss {

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);

void to_json(nlohmann::json& j, const SolverConfig& c);
void from_json(const nlohmann::json& j, SolverConfig& c);

void to_json(nlohmann::json& j, const TrackerConfig& c);
void from_json(const nlohmann::json& j, TrackerConfig& c);

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

}  // namespace joss
