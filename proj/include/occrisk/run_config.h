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

#ifndef OCCRISK_RUN_CONFIG_H_
#define OCCRISK_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "occrisk/harness.h"
#include "occrisk/world.h"

namespace occrisk {

inline constexpr int kRunConfigSchemaVersion = 1;

/// Everything one CLI invocation needs. Loaded from a JSON document whose
/// keys mirror ToJson(RunConfig); any subset may be given, unknown keys are
/// rejected.
struct RunConfig {
  Family family = Family::kSc1;
  /// Scenario seed for single runs, master seed for batches.
  std::uint64_t seed = 1;
  int episodes = 200;
  int workers = 0;
  std::string controller = "proposed";
  std::vector<std::string> controllers{"proposed", "B1", "B2", "B3"};
  std::string out;
  std::string trace;
  ScenarioConfig scenario;
  SimulationConfig simulation;

  /// Throws ConfigError on the first violated constraint.
  void Validate() const;
  BatchOptions MakeBatchOptions() const;
};

/// Command-line values; set fields win over the file.
struct RunOverrides {
  std::optional<Family> family;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> workers;
  std::optional<std::vector<std::string>> controllers;
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<std::string> trace;
};

/// Defaults, with the scenario block taken from the family's defaults.
RunConfig DefaultRunConfig(Family family = Family::kSc1);

nlohmann::json ToJson(const RunConfig& config);

/// Resolves `doc` over the defaults of its family (or of `overrides.family`)
/// and applies `overrides`. The result is validated.
RunConfig ResolveRunConfig(const nlohmann::json& doc,
                           const RunOverrides& overrides = {});

/// Reads a JSON file; throws ConfigError when it cannot be read or parsed.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

}  // namespace occrisk

#endif  // OCCRISK_RUN_CONFIG_H_
