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

#include "occrisk/run_config.h"

#include <fstream>
#include <string>
#include <utility>

#include "occrisk/scenario_io.h"

namespace occrisk {
namespace {

using nlohmann::json;

void Require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

// Overlays `patch` onto `base`. Every key of `patch` must already exist in
// `base`; objects merge recursively, everything else is replaced.
void MergeStrict(json& base, const json& patch, const std::string& where) {
  Require(patch.is_object(), where + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    Require(base.contains(it.key()), "unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      MergeStrict(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

class Reader {
 public:
  explicit Reader(const json& doc, std::string where = "")
      : doc_(doc), where_(std::move(where)) {}

  template <typename T>
  T Get(const char* key) const {
    const std::string path = where_.empty() ? key : where_ + "." + key;
    try {
      return doc_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + path + "': " + e.what());
    }
  }

  Reader Sub(const char* key) const {
    const std::string path = where_.empty() ? key : where_ + "." + key;
    Require(doc_.contains(key) && doc_.at(key).is_object(),
            "config key '" + path + "' must be an object");
    return Reader(doc_.at(key), path);
  }

  template <int Rows, int Cols>
  Eigen::Matrix<double, Rows, Cols> Matrix(const char* key) const {
    const auto rows = Get<std::vector<std::vector<double>>>(key);
    const std::string path = where_.empty() ? key : where_ + "." + key;
    Require(static_cast<int>(rows.size()) == Rows,
            "config key '" + path + "' has the wrong row count");
    Eigen::Matrix<double, Rows, Cols> m;
    for (int r = 0; r < Rows; ++r) {
      Require(static_cast<int>(rows[r].size()) == Cols,
              "config key '" + path + "' has the wrong column count");
      for (int c = 0; c < Cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

 private:
  const json& doc_;
  std::string where_;
};

template <typename Derived>
json MatrixJson(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json ZoneJson(const ZonePolicy& zone) {
  return {{"l_cautious", zone.l_cautious},
          {"l_steady", zone.l_steady},
          {"a_limit", zone.a_limit},
          {"j_limit", zone.j_limit}};
}

ZonePolicy ZoneFrom(const Reader& r) {
  return {r.Get<double>("l_cautious"), r.Get<double>("l_steady"),
          r.Get<double>("a_limit"), r.Get<double>("j_limit")};
}

json ScenarioJson(const ScenarioConfig& s) {
  return {{"pedestrians", {s.pedestrians.min, s.pedestrians.max}},
          {"parked_cars", {s.parked_cars.min, s.parked_cars.max}},
          {"non_crossing_fraction", s.non_crossing_fraction},
          {"road", ToJson(s.road)},
          {"vehicle", ToJson(s.vehicle)},
          {"ego_initial_speed", s.ego_initial_speed},
          {"parking_slot_length", s.parking_slot_length},
          {"parked_car_min_length", s.parked_car_min_length},
          {"parked_car_max_length", s.parked_car_max_length},
          {"parked_car_width", s.parked_car_width},
          {"parked_car_lateral_offset", s.parked_car_lateral_offset},
          {"crosswalk_min_position", s.crosswalk_min_position},
          {"crosswalk_max_position", s.crosswalk_max_position},
          {"pedestrian_speed_mean", s.pedestrian_speed_mean},
          {"pedestrian_speed_std", s.pedestrian_speed_std},
          {"trigger_min_distance", s.trigger_min_distance},
          {"trigger_max_distance", s.trigger_max_distance},
          {"behind_car_probability", s.behind_car_probability},
          {"crosswalk_probability", s.crosswalk_probability},
          {"pedestrian_min_position", s.pedestrian_min_position}};
}

IntRange RangeFrom(const Reader& r, const char* key) {
  const auto v = r.Get<std::vector<int>>(key);
  Require(v.size() == 2, std::string("config key 'scenario.") + key +
                             "' must be [min, max]");
  return {v[0], v[1]};
}

void ReadScenario(const Reader& r, ScenarioConfig& s) {
  s.pedestrians = RangeFrom(r, "pedestrians");
  s.parked_cars = RangeFrom(r, "parked_cars");
  s.non_crossing_fraction = r.Get<double>("non_crossing_fraction");
  const Reader road = r.Sub("road");
  s.road.length = road.Get<double>("length");
  s.road.lane_count = road.Get<int>("lane_count");
  s.road.lane_width = road.Get<double>("lane_width");
  s.road.speed_limit = road.Get<double>("speed_limit");
  s.road.friction_mu = road.Get<double>("friction_mu");
  s.road.crosswalk_position = road.Get<double>("crosswalk_position");
  s.road.crosswalk_width = road.Get<double>("crosswalk_width");
  s.road.sidewalk_width = road.Get<double>("sidewalk_width");
  const Reader vehicle = r.Sub("vehicle");
  s.vehicle.length = vehicle.Get<double>("length");
  s.vehicle.width = vehicle.Get<double>("width");
  s.vehicle.t_ramp_min = vehicle.Get<double>("t_ramp_min");
  s.ego_initial_speed = r.Get<double>("ego_initial_speed");
  s.parking_slot_length = r.Get<double>("parking_slot_length");
  s.parked_car_min_length = r.Get<double>("parked_car_min_length");
  s.parked_car_max_length = r.Get<double>("parked_car_max_length");
  s.parked_car_width = r.Get<double>("parked_car_width");
  s.parked_car_lateral_offset = r.Get<double>("parked_car_lateral_offset");
  s.crosswalk_min_position = r.Get<double>("crosswalk_min_position");
  s.crosswalk_max_position = r.Get<double>("crosswalk_max_position");
  s.pedestrian_speed_mean = r.Get<double>("pedestrian_speed_mean");
  s.pedestrian_speed_std = r.Get<double>("pedestrian_speed_std");
  s.trigger_min_distance = r.Get<double>("trigger_min_distance");
  s.trigger_max_distance = r.Get<double>("trigger_max_distance");
  s.behind_car_probability = r.Get<double>("behind_car_probability");
  s.crosswalk_probability = r.Get<double>("crosswalk_probability");
  s.pedestrian_min_position = r.Get<double>("pedestrian_min_position");
}

RunConfig FromJson(const json& doc) {
  const Reader r(doc);
  Require(r.Get<int>("schema_version") == kRunConfigSchemaVersion,
          "unsupported config schema_version");
  RunConfig c;
  c.family = ParseFamily(r.Get<std::string>("family"));
  c.seed = r.Get<std::uint64_t>("seed");
  c.episodes = r.Get<int>("episodes");
  c.workers = r.Get<int>("workers");
  c.controller = r.Get<std::string>("controller");
  c.controllers = r.Get<std::vector<std::string>>("controllers");
  c.out = r.Get<std::string>("out");
  c.trace = r.Get<std::string>("trace");

  SimulationConfig& sim = c.simulation;
  ControllerContext& ctx = sim.controller;
  ctx.dt = r.Get<double>("dt");

  const Reader sensor = r.Sub("sensor");
  sim.sensor.r_visible = sensor.Get<double>("r_visible");
  sim.sensor.fov_half_angle = sensor.Get<double>("fov_half_angle");
  const auto mount = sensor.Get<std::vector<double>>("mount_point");
  Require(mount.size() == 2, "config key 'sensor.mount_point' must be [x, y]");
  sim.sensor.mount_point = {mount[0], mount[1]};
  sim.sensor.pedestrians_occlude = sensor.Get<bool>("pedestrians_occlude");
  sim.sensor.pedestrian_occluder_size =
      sensor.Get<double>("pedestrian_occluder_size");
  sim.sensor.polygon_arc_step = sensor.Get<double>("polygon_arc_step");
  sim.sensor.sidewalk_resolution = sensor.Get<double>("sidewalk_resolution");

  const Reader est = r.Sub("estimator");
  ctx.estimator.weights.w = est.Get<std::array<double, 6>>("weights");
  ctx.estimator.density_window = est.Get<double>("density_window");
  ctx.estimator.car_saturation = est.Get<double>("car_saturation");
  ctx.estimator.pedestrian_saturation =
      est.Get<double>("pedestrian_saturation");

  const Reader pol = r.Sub("policy");
  PolicyThresholds& p = ctx.policy;
  p.danger = ZoneFrom(pol.Sub("danger"));
  p.discomfort = ZoneFrom(pol.Sub("discomfort"));
  p.normal_a_limit = pol.Get<double>("normal_a_limit");
  p.normal_j_limit = pol.Get<double>("normal_j_limit");
  p.alpha1 = pol.Get<double>("alpha1");
  p.alpha2 = pol.Get<double>("alpha2");
  p.ttc_stop = pol.Get<double>("ttc_stop");
  p.ttc_emergency = pol.Get<double>("ttc_emergency");
  p.delta_d = pol.Get<double>("delta_d");
  p.yield_standoff = pol.Get<double>("yield_standoff");
  p.yield_a_limit = pol.Get<double>("yield_a_limit");
  p.path_lateral_margin = pol.Get<double>("path_lateral_margin");
  p.path_time_margin = pol.Get<double>("path_time_margin");
  p.track_memory = pol.Get<double>("track_memory");

  const Reader comfort = r.Sub("comfort_braking");
  ctx.comfort.a_level = comfort.Get<double>("a_level");
  ctx.comfort.t_ramp = comfort.Get<double>("t_ramp");

  const Reader g = r.Sub("gains");
  ctx.gains.k_cruise = g.Matrix<1, 2>("k_cruise");
  ctx.gains.k_yield = g.Matrix<1, 3>("k_yield");
  ctx.gains.q_cruise = g.Matrix<2, 2>("q_cruise");
  ctx.gains.r_cruise = g.Matrix<1, 1>("r_cruise");
  ctx.gains.q_yield = g.Matrix<3, 3>("q_yield");
  ctx.gains.r_yield = g.Matrix<1, 1>("r_yield");
  ctx.gains.j_yield = g.Get<double>("j_yield");
  ctx.gains.j_cruise = g.Get<double>("j_cruise");

  const Reader s = r.Sub("simulation");
  sim.b3_slow_distance = s.Get<double>("b3_slow_distance");
  sim.actuation_delay_ticks = s.Get<int>("actuation_delay_ticks");
  sim.timeout_factor = s.Get<double>("timeout_factor");
  sim.trace_polygon = s.Get<bool>("trace_polygon");

  c.scenario = DefaultScenarioConfig(c.family, c.seed);
  ReadScenario(r.Sub("scenario"), c.scenario);
  c.scenario.tick = ctx.dt;
  return c;
}

}  // namespace

void RunConfig::Validate() const {
  Require(episodes >= 1, "episodes must be >= 1");
  Require(workers >= 0, "workers must be >= 0");
  Require(IsKnownController(controller),
          "unknown controller '" + controller + "'");
  Require(!controllers.empty(), "controllers must not be empty");
  for (const std::string& name : controllers) {
    Require(IsKnownController(name), "unknown controller '" + name + "'");
  }
  scenario.Validate();
  simulation.Validate();
  const BrakingProfile& comfort = simulation.controller.comfort;
  Require(comfort.a_level <= scenario.road.MaxDeceleration() &&
              comfort.t_ramp >= scenario.vehicle.t_ramp_min,
          "comfort braking must be gentler than the physical limit");
}

BatchOptions RunConfig::MakeBatchOptions() const {
  BatchOptions options;
  options.scenario = scenario;
  options.master_seed = seed;
  options.episodes = episodes;
  options.workers = workers;
  options.controllers = controllers;
  return options;
}

RunConfig DefaultRunConfig(Family family) {
  RunConfig c;
  c.family = family;
  c.scenario = DefaultScenarioConfig(family, c.seed);
  c.scenario.tick = c.simulation.controller.dt;
  return c;
}

json ToJson(const RunConfig& c) {
  const SimulationConfig& sim = c.simulation;
  const ControllerContext& ctx = sim.controller;
  const PolicyThresholds& p = ctx.policy;
  return {
      {"schema_version", kRunConfigSchemaVersion},
      {"family", ToString(c.family)},
      {"seed", c.seed},
      {"episodes", c.episodes},
      {"workers", c.workers},
      {"controller", c.controller},
      {"controllers", c.controllers},
      {"out", c.out},
      {"trace", c.trace},
      {"dt", ctx.dt},
      {"sensor",
       {{"r_visible", sim.sensor.r_visible},
        {"fov_half_angle", sim.sensor.fov_half_angle},
        {"mount_point", {sim.sensor.mount_point.x, sim.sensor.mount_point.y}},
        {"pedestrians_occlude", sim.sensor.pedestrians_occlude},
        {"pedestrian_occluder_size", sim.sensor.pedestrian_occluder_size},
        {"polygon_arc_step", sim.sensor.polygon_arc_step},
        {"sidewalk_resolution", sim.sensor.sidewalk_resolution}}},
      {"estimator",
       {{"weights", ctx.estimator.weights.w},
        {"density_window", ctx.estimator.density_window},
        {"car_saturation", ctx.estimator.car_saturation},
        {"pedestrian_saturation", ctx.estimator.pedestrian_saturation}}},
      {"policy",
       {{"danger", ZoneJson(p.danger)},
        {"discomfort", ZoneJson(p.discomfort)},
        {"normal_a_limit", p.normal_a_limit},
        {"normal_j_limit", p.normal_j_limit},
        {"alpha1", p.alpha1},
        {"alpha2", p.alpha2},
        {"ttc_stop", p.ttc_stop},
        {"ttc_emergency", p.ttc_emergency},
        {"delta_d", p.delta_d},
        {"yield_standoff", p.yield_standoff},
        {"yield_a_limit", p.yield_a_limit},
        {"path_lateral_margin", p.path_lateral_margin},
        {"path_time_margin", p.path_time_margin},
        {"track_memory", p.track_memory}}},
      {"comfort_braking",
       {{"a_level", ctx.comfort.a_level}, {"t_ramp", ctx.comfort.t_ramp}}},
      {"gains",
       {{"k_cruise", MatrixJson(ctx.gains.k_cruise)},
        {"k_yield", MatrixJson(ctx.gains.k_yield)},
        {"q_cruise", MatrixJson(ctx.gains.q_cruise)},
        {"r_cruise", MatrixJson(ctx.gains.r_cruise)},
        {"q_yield", MatrixJson(ctx.gains.q_yield)},
        {"r_yield", MatrixJson(ctx.gains.r_yield)},
        {"j_yield", ctx.gains.j_yield},
        {"j_cruise", ctx.gains.j_cruise}}},
      {"simulation",
       {{"b3_slow_distance", sim.b3_slow_distance},
        {"actuation_delay_ticks", sim.actuation_delay_ticks},
        {"timeout_factor", sim.timeout_factor},
        {"trace_polygon", sim.trace_polygon}}},
      {"scenario", ScenarioJson(c.scenario)},
  };
}

RunConfig ResolveRunConfig(const json& doc, const RunOverrides& overrides) {
  Require(doc.is_null() || doc.is_object(), "config must be a JSON object");
  Family family = Family::kSc1;
  if (overrides.family) {
    family = *overrides.family;
  } else if (doc.is_object() && doc.contains("family")) {
    Require(doc["family"].is_string(), "config key 'family' must be a string");
    family = ParseFamily(doc["family"].get<std::string>());
  }
  json resolved = ToJson(DefaultRunConfig(family));
  if (doc.is_object()) MergeStrict(resolved, doc, "");

  resolved["family"] = ToString(family);
  if (overrides.seed) resolved["seed"] = *overrides.seed;
  if (overrides.episodes) resolved["episodes"] = *overrides.episodes;
  if (overrides.workers) resolved["workers"] = *overrides.workers;
  if (overrides.controllers) {
    Require(!overrides.controllers->empty(), "--controller needs a value");
    resolved["controllers"] = *overrides.controllers;
    resolved["controller"] = overrides.controllers->front();
  }
  if (overrides.out) resolved["out"] = *overrides.out;
  if (overrides.dt) resolved["dt"] = *overrides.dt;
  if (overrides.trace) resolved["trace"] = *overrides.trace;

  RunConfig config = FromJson(resolved);
  config.Validate();
  return config;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot read '" + path.string() + "'");
  try {
    return json::parse(file);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace occrisk
