// Copyright 2026 The occrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OCCRISK_SCENARIO_IO_H_
#define OCCRISK_SCENARIO_IO_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "occrisk/world.h"

namespace occrisk {

/// Version tag written into every scenario document.
inline constexpr int kScenarioSchemaVersion = 1;

nlohmann::json ToJson(const Road& road);
nlohmann::json ToJson(const VehicleSpec& vehicle);
nlohmann::json ToJson(const ParkedCar& car);
nlohmann::json ToJson(const Pedestrian& pedestrian);
nlohmann::json ToJson(const EgoState& ego);

/// One self-contained scenario document. `config` is embedded when given so
/// a scenario file records how it was produced.
nlohmann::json ScenarioToJson(const WorldState& world,
                              const ScenarioConfig* config = nullptr);

/// Parses a scenario document; throws ConfigError on schema violations or
/// invariant failures.
WorldState ScenarioFromJson(const nlohmann::json& doc);

void WriteScenarioFile(const std::filesystem::path& path,
                       const WorldState& world,
                       const ScenarioConfig* config = nullptr);
WorldState ReadScenarioFile(const std::filesystem::path& path);

}  // namespace occrisk

#endif  // OCCRISK_SCENARIO_IO_H_
