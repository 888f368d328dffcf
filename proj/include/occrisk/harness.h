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

#ifndef OCCRISK_HARNESS_H_
#define OCCRISK_HARNESS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "occrisk/controller.h"
#include "occrisk/visibility.h"
#include "occrisk/world.h"

namespace occrisk {

inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

inline constexpr std::array<std::string_view, 4> kControllerNames{
    "proposed", "B1", "B2", "B3"};

bool IsKnownController(std::string_view name);

/// Settings shared by every episode of a run, independent of the scenario.
struct SimulationConfig {
  SensorSpec sensor;
  ControllerContext controller;
  /// Look-ahead within which B3 reacts to a visible crosswalk.
  double b3_slow_distance = 20.0;
  /// Ticks between a command and its actuation.
  int actuation_delay_ticks = 0;
  /// Episode time budget, in multiples of the time needed to drive the road
  /// at the slowest drive-state speed.
  double timeout_factor = 3.0;
  bool record_trace = true;
  /// Adds the visibility polygon to every trace tick.
  bool trace_polygon = false;

  void Validate() const;
  double TimeBudget(const Road& road) const;
};

/// Throws ConfigError for an unknown name.
std::unique_ptr<LongitudinalController> MakeController(
    std::string_view name, const SimulationConfig& config);

enum class Outcome { kSuccess, kCollision, kTimeout, kFailed };

std::string_view ToString(Outcome outcome);

struct PedestrianSnapshot {
  int id = 0;
  Vec2 position;
  PedestrianState state = PedestrianState::kWaiting;
};

/// One simulation tick: the world as sensed, the decision taken, and the
/// acceleration that actually acted over [time, time + dt).
struct TraceTick {
  int tick = 0;
  double time = 0.0;
  EgoState ego;
  ControlCommand command;
  std::optional<FsmEvent> event;
  RiskZones zones;
  std::optional<ScanResult> scan;
  std::optional<YieldTarget> yield_target;
  std::vector<int> visible_pedestrians;
  std::vector<int> visible_parked_cars;
  bool crosswalk_visible = false;
  std::vector<PedestrianSnapshot> pedestrians;
  std::vector<Vec2> polygon;
  double applied_accel = 0.0;
  /// (v(t + dt) - v(t)) / dt; differs from applied_accel when the ego stops.
  double realized_accel = 0.0;
};

/// One pedestrian the ego had to yield to. Unsuccessful when Emergency was
/// entered while it was the yield target.
struct YieldEvent {
  int pedestrian_id = 0;
  int first_tick = 0;
  double first_ttc = 0.0;
  double first_gap = 0.0;
  double first_d_stop_min = 0.0;
  bool emergency = false;
  bool hit = false;
};

struct EpisodeRecord {
  std::string controller;
  Family family = Family::kSc1;
  std::uint64_t seed = 0;
  double dt = 0.1;
  Outcome outcome = Outcome::kFailed;
  std::string diagnostic;
  std::vector<TraceTick> trace;
  std::vector<YieldEvent> yields;
  int successful_yields = 0;
  int unsuccessful_yields = 0;
  /// Negative realized accelerations, one per decelerating tick.
  std::vector<double> decel_samples;
  double emergency_time = 0.0;
  double duration = 0.0;
  int ticks = 0;
  int illegal_transitions = 0;
  std::optional<int> collided_pedestrian;
};

/// Simulates one episode from `initial`. Never throws: internal failures end
/// the episode with Outcome::kFailed and a diagnostic.
EpisodeRecord RunEpisode(const WorldState& initial,
                         const SimulationConfig& config,
                         std::string_view controller, Family family = {},
                         std::uint64_t seed = 0);

/// Generates the scenario for `scenario` and simulates it.
EpisodeRecord RunEpisode(const ScenarioConfig& scenario,
                         const SimulationConfig& config,
                         std::string_view controller);

/// Seed of episode `index` within a batch: splitmix64 applied to the
/// `index`-th state after `master`.
std::uint64_t EpisodeSeed(std::uint64_t master, std::uint64_t index);

struct ControllerSummary {
  std::string controller;
  Family family = Family::kSc1;
  int episodes = 0;
  long mt1_successful = 0;
  long mt1_unsuccessful = 0;
  /// Over every decelerating tick of every episode.
  double mt2_mean = 0.0;
  double mt2_std = 0.0;
  long mt2_samples = 0;
  int mt3 = 0;
  /// Emergency-braking time per successful episode.
  double mt4_mean = 0.0;
  double mt4_std = 0.0;
  int collisions = 0;
  int timeouts = 0;
  int failures = 0;
  int illegal_transitions = 0;
};

/// Aggregates records of one controller and family. Standard deviations are
/// population values; empty sample sets give 0.
ControllerSummary Summarize(std::string_view controller, Family family,
                            const std::vector<EpisodeRecord>& records);

struct BatchSummary {
  std::vector<ControllerSummary> rows;
};

struct EpisodeIndexEntry {
  std::string controller;
  int episode = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kFailed;
  int successful_yields = 0;
  int unsuccessful_yields = 0;
  double emergency_time = 0.0;
  double duration = 0.0;
  std::string diagnostic;
};

struct BatchOptions {
  /// Family, counts and layout parameters; the seed is replaced per episode.
  ScenarioConfig scenario;
  std::uint64_t master_seed = 0;
  int episodes = 1;
  /// 0 selects the hardware concurrency.
  int workers = 0;
  std::vector<std::string> controllers{"proposed", "B1", "B2", "B3"};
  /// Keep per-episode records (with traces when the simulation records
  /// them) in the result.
  bool keep_records = false;

  void Validate() const;
};

struct BatchResult {
  BatchSummary summary;
  std::vector<EpisodeIndexEntry> index;
  /// Filled when keep_records is set; ordered by controller, then episode.
  std::vector<EpisodeRecord> records;
};

/// Called once per finished episode. Calls are serialized but arrive in
/// completion order.
using EpisodeCallback =
    std::function<void(int episode, const EpisodeRecord& record)>;

/// Runs every controller on the same seeded scenario sequence. The result
/// does not depend on the worker count.
BatchResult RunBatch(const BatchOptions& options,
                     const SimulationConfig& config,
                     const EpisodeCallback& on_episode = {});

nlohmann::json ToJson(const TraceTick& tick);
/// Record fields without the trace.
nlohmann::json ToJson(const EpisodeRecord& record);
nlohmann::json ToJson(const ControllerSummary& row);
nlohmann::json ToJson(const BatchSummary& summary);

std::string SummaryCsv(const BatchSummary& summary);
std::string EpisodeIndexCsv(const std::vector<EpisodeIndexEntry>& index);

/// Trace file: a header line, one line per tick, and an outcome line, each a
/// JSON object carrying schema_version and kind.
void WriteTraceJsonl(const std::filesystem::path& path,
                     const EpisodeRecord& record);

/// Writes text to `path`, throwing std::runtime_error on failure.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace occrisk

#endif  // OCCRISK_HARNESS_H_
