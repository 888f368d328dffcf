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

#include "occrisk/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "occrisk/baselines.h"
#include "occrisk/perception.h"
#include "occrisk/risk_zones.h"

namespace occrisk {
namespace {

using nlohmann::json;

void Require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd Moments(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

std::string FormatDouble(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

json ToJson(const Vec2& p) { return json::array({p.x, p.y}); }

json ToJson(const RiskZones& zones) {
  return {{"d_stop_min", zones.d_stop_min},
          {"d_stop_comfort", zones.d_stop_comfort},
          {"r_visible", zones.r_visible},
          {"safety_truncated", zones.safety_truncated}};
}

json ToJson(const ControlCommand& command) {
  return {{"fsm_state", ToString(command.fsm_state)},
          {"v_ref", command.v_ref},
          {"a_limit", command.a_limit},
          {"j_limit", command.j_limit},
          {"accel_out", command.accel_out}};
}

// Bookkeeping for the pedestrians the controller yielded to.
class YieldTracker {
 public:
  void Observe(const Decision& decision, int tick) {
    if (!decision.yield_target) return;
    const YieldTarget& target = *decision.yield_target;
    auto [it, inserted] = events_.try_emplace(target.pedestrian_id);
    YieldEvent& event = it->second;
    if (inserted) {
      event.pedestrian_id = target.pedestrian_id;
      event.first_tick = tick;
      event.first_ttc = target.ttc;
      event.first_gap = target.gap;
      event.first_d_stop_min = decision.zones.d_stop_min;
    }
    if (decision.command.fsm_state == FsmState::kEmergency) {
      event.emergency = true;
    }
  }

  void MarkHit(int id) {
    auto it = events_.find(id);
    if (it != events_.end()) it->second.hit = true;
  }

  void Finish(EpisodeRecord& record) const {
    const bool collided = record.outcome == Outcome::kCollision;
    for (const auto& [id, event] : events_) {
      record.yields.push_back(event);
      if (event.emergency) {
        ++record.unsuccessful_yields;
      } else if (!collided) {
        ++record.successful_yields;
      }
    }
  }

 private:
  std::map<int, YieldEvent> events_;
};

TraceTick MakeTraceTick(const WorldState& world, const VisibilityResult& vis,
                        const Decision& decision, bool with_polygon) {
  TraceTick tick;
  tick.tick = world.tick;
  tick.time = world.time;
  tick.ego = world.ego;
  tick.command = decision.command;
  tick.event = decision.event;
  tick.zones = decision.zones;
  tick.scan = decision.scan;
  tick.yield_target = decision.yield_target;
  tick.visible_pedestrians = vis.visible_pedestrian_ids;
  tick.visible_parked_cars = vis.visible_parked_car_indices;
  tick.crosswalk_visible = vis.crosswalk_visible;
  for (const Pedestrian& p : world.pedestrians) {
    tick.pedestrians.push_back({p.id, p.position, p.state});
  }
  if (with_polygon) tick.polygon = vis.polygon;
  return tick;
}

void SimulateInto(EpisodeRecord& record, const WorldState& initial,
                  const SimulationConfig& config,
                  std::string_view controller_name) {
  initial.Validate();
  std::unique_ptr<LongitudinalController> controller =
      MakeController(controller_name, config);
  const double dt = config.controller.dt;
  const double budget = config.TimeBudget(initial.road);
  std::deque<double> pending(
      static_cast<std::size_t>(config.actuation_delay_ticks),
      initial.ego.acceleration);

  YieldTracker yields;
  WorldState world = initial;
  for (;;) {
    const VisibilityResult vis = ComputeVisibility(world, config.sensor);
    const Perception scene = Perceive(world, vis, config.sensor);
    const FsmState previous = controller->state();
    const Decision decision = controller->Step(scene);
    if (decision.command.fsm_state != previous && !decision.event) {
      ++record.illegal_transitions;
      if (record.diagnostic.empty()) {
        record.diagnostic = "illegal transition " +
                            std::string(ToString(previous)) + " -> " +
                            std::string(ToString(decision.command.fsm_state)) +
                            " at tick " + std::to_string(world.tick);
      }
    }

    pending.push_back(decision.command.accel_out);
    const double command = pending.front();
    pending.pop_front();
    WorldState next = StepWorld(world, command, dt);

    yields.Observe(decision, world.tick);
    if (decision.command.fsm_state == FsmState::kEmergency) {
      record.emergency_time += dt;
    }
    const double realized = (next.ego.velocity - world.ego.velocity) / dt;
    if (realized < 0.0) record.decel_samples.push_back(realized);

    if (config.record_trace) {
      TraceTick tick =
          MakeTraceTick(world, vis, decision, config.trace_polygon);
      tick.applied_accel = next.ego.acceleration;
      tick.realized_accel = realized;
      record.trace.push_back(std::move(tick));
    }
    ++record.ticks;

    const std::optional<int> hit = DetectCollision(next);
    world = std::move(next);
    if (hit) {
      for (Pedestrian& p : world.pedestrians) {
        if (p.id == *hit) p.state = PedestrianState::kHit;
      }
      yields.MarkHit(*hit);
      record.collided_pedestrian = hit;
      record.outcome = Outcome::kCollision;
      break;
    }
    if (world.EgoFront() >= world.road.length) {
      record.outcome = Outcome::kSuccess;
      break;
    }
    if (world.time >= budget) {
      record.outcome = Outcome::kTimeout;
      break;
    }
  }
  record.duration = world.time - initial.time;
  yields.Finish(record);
  if (record.illegal_transitions > 0) record.outcome = Outcome::kFailed;
}

}  // namespace

bool IsKnownController(std::string_view name) {
  return std::find(kControllerNames.begin(), kControllerNames.end(), name) !=
         kControllerNames.end();
}

void SimulationConfig::Validate() const {
  sensor.Validate();
  controller.estimator.Validate();
  controller.policy.Validate();
  Require(controller.dt > 0.0 && std::isfinite(controller.dt),
          "dt must be > 0");
  Require(controller.comfort.a_level > 0.0 && controller.comfort.t_ramp >= 0.0,
          "comfort braking needs a_level > 0 and t_ramp >= 0");
  controller.gains.Validate(controller.dt);
  Require(b3_slow_distance >= 0.0, "b3_slow_distance must be >= 0");
  Require(actuation_delay_ticks >= 0, "actuation_delay_ticks must be >= 0");
  Require(timeout_factor > 0.0, "timeout_factor must be > 0");
}

double SimulationConfig::TimeBudget(const Road& road) const {
  const double slowest =
      std::min(controller.policy.alpha1, controller.policy.alpha2);
  return timeout_factor * road.length / (slowest * road.speed_limit);
}

std::unique_ptr<LongitudinalController> MakeController(
    std::string_view name, const SimulationConfig& config) {
  if (name == "proposed") {
    return std::make_unique<ProposedController>(config.controller);
  }
  if (name == "B1") {
    return std::make_unique<SpeedLimitBaseline>(config.controller);
  }
  if (name == "B2") {
    return std::make_unique<ReducedSpeedBaseline>(config.controller);
  }
  if (name == "B3") {
    return std::make_unique<CrosswalkBaseline>(config.controller,
                                               config.b3_slow_distance);
  }
  throw ConfigError("unknown controller '" + std::string(name) +
                    "' (expected proposed, B1, B2 or B3)");
}

std::string_view ToString(Outcome outcome) {
  switch (outcome) {
    case Outcome::kSuccess:
      return "success";
    case Outcome::kCollision:
      return "collision";
    case Outcome::kTimeout:
      return "timeout";
    case Outcome::kFailed:
      return "failed";
  }
  return "failed";
}

EpisodeRecord RunEpisode(const WorldState& initial,
                         const SimulationConfig& config,
                         std::string_view controller, Family family,
                         std::uint64_t seed) {
  EpisodeRecord record;
  record.controller = std::string(controller);
  record.family = family;
  record.seed = seed;
  record.dt = config.controller.dt;
  try {
    SimulateInto(record, initial, config, controller);
  } catch (const std::exception& e) {
    record.outcome = Outcome::kFailed;
    record.diagnostic = e.what();
  }
  return record;
}

EpisodeRecord RunEpisode(const ScenarioConfig& scenario,
                         const SimulationConfig& config,
                         std::string_view controller) {
  WorldState initial;
  try {
    initial = GenerateScenario(scenario);
  } catch (const std::exception& e) {
    EpisodeRecord record;
    record.controller = std::string(controller);
    record.family = scenario.family;
    record.seed = scenario.seed;
    record.dt = config.controller.dt;
    record.diagnostic = std::string("scenario generation: ") + e.what();
    return record;
  }
  return RunEpisode(initial, config, controller, scenario.family,
                    scenario.seed);
}

std::uint64_t EpisodeSeed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ControllerSummary Summarize(std::string_view controller, Family family,
                            const std::vector<EpisodeRecord>& records) {
  ControllerSummary row;
  row.controller = std::string(controller);
  row.family = family;
  std::vector<double> decel;
  std::vector<double> emergency;
  for (const EpisodeRecord& r : records) {
    ++row.episodes;
    row.mt1_successful += r.successful_yields;
    row.mt1_unsuccessful += r.unsuccessful_yields;
    decel.insert(decel.end(), r.decel_samples.begin(), r.decel_samples.end());
    row.illegal_transitions += r.illegal_transitions;
    switch (r.outcome) {
      case Outcome::kSuccess:
        ++row.mt3;
        emergency.push_back(r.emergency_time);
        break;
      case Outcome::kCollision:
        ++row.collisions;
        break;
      case Outcome::kTimeout:
        ++row.timeouts;
        break;
      case Outcome::kFailed:
        ++row.failures;
        break;
    }
  }
  const MeanStd mt2 = Moments(decel);
  row.mt2_mean = mt2.mean;
  row.mt2_std = mt2.std;
  row.mt2_samples = static_cast<long>(decel.size());
  const MeanStd mt4 = Moments(emergency);
  row.mt4_mean = mt4.mean;
  row.mt4_std = mt4.std;
  return row;
}

void BatchOptions::Validate() const {
  scenario.Validate();
  Require(episodes >= 1, "episodes must be >= 1");
  Require(workers >= 0, "workers must be >= 0");
  Require(!controllers.empty(), "at least one controller is required");
  for (const std::string& name : controllers) {
    Require(IsKnownController(name), "unknown controller '" + name + "'");
  }
}

BatchResult RunBatch(const BatchOptions& options,
                     const SimulationConfig& config,
                     const EpisodeCallback& on_episode) {
  options.Validate();
  config.Validate();

  const int n = options.episodes;
  const int jobs = n * static_cast<int>(options.controllers.size());
  std::vector<EpisodeRecord> records(static_cast<std::size_t>(jobs));

  int workers = options.workers;
  if (workers == 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = std::min(workers, jobs);

  std::atomic<int> next{0};
  std::mutex callback_mutex;
  auto work = [&]() {
    for (int job = next++; job < jobs; job = next++) {
      const std::string& name =
          options.controllers[static_cast<std::size_t>(job / n)];
      const int episode = job % n;
      ScenarioConfig scenario = options.scenario;
      scenario.seed =
          EpisodeSeed(options.master_seed, static_cast<std::uint64_t>(episode));
      EpisodeRecord record = RunEpisode(scenario, config, name);
      if (on_episode) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        on_episode(episode, record);
      }
      if (!options.keep_records) record.trace.clear();
      records[static_cast<std::size_t>(job)] = std::move(record);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  BatchResult result;
  for (std::size_t c = 0; c < options.controllers.size(); ++c) {
    std::vector<EpisodeRecord> group(
        std::make_move_iterator(records.begin() + c * n),
        std::make_move_iterator(records.begin() + (c + 1) * n));
    result.summary.rows.push_back(Summarize(options.controllers[c],
                                            options.scenario.family, group));
    for (int k = 0; k < n; ++k) {
      const EpisodeRecord& r = group[static_cast<std::size_t>(k)];
      result.index.push_back({r.controller, k, r.seed, r.outcome,
                              r.successful_yields, r.unsuccessful_yields,
                              r.emergency_time, r.duration, r.diagnostic});
    }
    if (options.keep_records) {
      std::move(group.begin(), group.end(), std::back_inserter(result.records));
    }
  }
  return result;
}

json ToJson(const TraceTick& tick) {
  json j;
  j["schema_version"] = kTraceSchemaVersion;
  j["kind"] = "tick";
  j["tick"] = tick.tick;
  j["time"] = tick.time;
  j["ego"] = {{"position", tick.ego.longitudinal_position},
              {"velocity", tick.ego.velocity},
              {"acceleration", tick.ego.acceleration}};
  j["command"] = ToJson(tick.command);
  j["event"] = tick.event ? json(ToString(*tick.event)) : json(nullptr);
  j["zones"] = ToJson(tick.zones);
  if (tick.scan) {
    j["scan"] = {{"danger_max", tick.scan->danger_max},
                 {"discomfort_max", tick.scan->discomfort_max},
                 {"state", ToString(tick.scan->state)},
                 {"deciding_zone", tick.scan->deciding_zone
                                       ? json(ToString(*tick.scan->deciding_zone))
                                       : json(nullptr)},
                 {"points", tick.scan->points}};
  } else {
    j["scan"] = nullptr;
  }
  if (tick.yield_target) {
    j["yield_target"] = {{"pedestrian_id", tick.yield_target->pedestrian_id},
                         {"gap", tick.yield_target->gap},
                         {"ttc", std::isfinite(tick.yield_target->ttc)
                                     ? json(tick.yield_target->ttc)
                                     : json(nullptr)}};
  } else {
    j["yield_target"] = nullptr;
  }
  j["visible_pedestrians"] = tick.visible_pedestrians;
  j["visible_parked_cars"] = tick.visible_parked_cars;
  j["crosswalk_visible"] = tick.crosswalk_visible;
  json peds = json::array();
  for (const PedestrianSnapshot& p : tick.pedestrians) {
    peds.push_back(
        {{"id", p.id}, {"position", ToJson(p.position)}, {"state", ToString(p.state)}});
  }
  j["pedestrians"] = std::move(peds);
  if (!tick.polygon.empty()) {
    json poly = json::array();
    for (const Vec2& v : tick.polygon) poly.push_back(ToJson(v));
    j["polygon"] = std::move(poly);
  }
  j["applied_accel"] = tick.applied_accel;
  j["realized_accel"] = tick.realized_accel;
  return j;
}

json ToJson(const EpisodeRecord& record) {
  json yields = json::array();
  for (const YieldEvent& e : record.yields) {
    yields.push_back({{"pedestrian_id", e.pedestrian_id},
                      {"first_tick", e.first_tick},
                      {"first_ttc", std::isfinite(e.first_ttc)
                                        ? json(e.first_ttc)
                                        : json(nullptr)},
                      {"first_gap", e.first_gap},
                      {"first_d_stop_min", e.first_d_stop_min},
                      {"emergency", e.emergency},
                      {"hit", e.hit}});
  }
  return {{"schema_version", kTraceSchemaVersion},
          {"controller", record.controller},
          {"family", ToString(record.family)},
          {"seed", record.seed},
          {"dt", record.dt},
          {"outcome", ToString(record.outcome)},
          {"diagnostic", record.diagnostic},
          {"ticks", record.ticks},
          {"duration", record.duration},
          {"successful_yields", record.successful_yields},
          {"unsuccessful_yields", record.unsuccessful_yields},
          {"yields", std::move(yields)},
          {"decel_samples", record.decel_samples},
          {"emergency_time", record.emergency_time},
          {"illegal_transitions", record.illegal_transitions},
          {"collided_pedestrian", record.collided_pedestrian
                                      ? json(*record.collided_pedestrian)
                                      : json(nullptr)}};
}

json ToJson(const ControllerSummary& row) {
  return {{"controller", row.controller},
          {"family", ToString(row.family)},
          {"episodes", row.episodes},
          {"mt1_succ", row.mt1_successful},
          {"mt1_unsucc", row.mt1_unsuccessful},
          {"mt2_mean", row.mt2_mean},
          {"mt2_std", row.mt2_std},
          {"mt2_samples", row.mt2_samples},
          {"mt3", row.mt3},
          {"mt4_mean", row.mt4_mean},
          {"mt4_std", row.mt4_std},
          {"collisions", row.collisions},
          {"timeouts", row.timeouts},
          {"failures", row.failures},
          {"illegal_transitions", row.illegal_transitions}};
}

json ToJson(const BatchSummary& summary) {
  json rows = json::array();
  for (const ControllerSummary& row : summary.rows) rows.push_back(ToJson(row));
  return {{"schema_version", kSummarySchemaVersion}, {"rows", std::move(rows)}};
}

std::string SummaryCsv(const BatchSummary& summary) {
  std::ostringstream out;
  out << "controller,family,mt1_succ,mt1_unsucc,mt2_mean,mt2_std,mt3,"
         "mt4_mean,mt4_std\n";
  for (const ControllerSummary& r : summary.rows) {
    out << r.controller << ',' << ToString(r.family) << ',' << r.mt1_successful
        << ',' << r.mt1_unsuccessful << ',' << FormatDouble(r.mt2_mean) << ','
        << FormatDouble(r.mt2_std) << ',' << r.mt3 << ','
        << FormatDouble(r.mt4_mean) << ',' << FormatDouble(r.mt4_std) << '\n';
  }
  return out.str();
}

std::string EpisodeIndexCsv(const std::vector<EpisodeIndexEntry>& index) {
  std::ostringstream out;
  out << "controller,episode,seed,outcome,yields_succ,yields_unsucc,"
         "emergency_time,duration,diagnostic\n";
  for (const EpisodeIndexEntry& e : index) {
    std::string diagnostic = e.diagnostic;
    std::replace(diagnostic.begin(), diagnostic.end(), ',', ';');
    std::replace(diagnostic.begin(), diagnostic.end(), '\n', ' ');
    out << e.controller << ',' << e.episode << ',' << e.seed << ','
        << ToString(e.outcome) << ',' << e.successful_yields << ','
        << e.unsuccessful_yields << ',' << FormatDouble(e.emergency_time)
        << ',' << FormatDouble(e.duration) << ',' << diagnostic << '\n';
  }
  return out.str();
}

void WriteTraceJsonl(const std::filesystem::path& path,
                     const EpisodeRecord& record) {
  std::ostringstream out;
  json header = {{"schema_version", kTraceSchemaVersion},
                 {"kind", "header"},
                 {"controller", record.controller},
                 {"family", ToString(record.family)},
                 {"seed", record.seed},
                 {"dt", record.dt}};
  out << header.dump() << '\n';
  for (const TraceTick& tick : record.trace) out << ToJson(tick).dump() << '\n';
  json footer = ToJson(record);
  footer["kind"] = "outcome";
  out << footer.dump() << '\n';
  WriteTextFile(path, out.str());
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "'");
  file << text;
  file.close();
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
}

}  // namespace occrisk
