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

#include "occrisk/scenario_io.h"

#include <fstream>

namespace occrisk {
namespace {

using nlohmann::json;

template <typename T>
T Field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("scenario document is missing '") + key +
                      "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field '") + key + "': " + e.what());
  }
}

Road RoadFromJson(const json& j) {
  Road road;
  road.length = Field<double>(j, "length");
  road.lane_count = Field<int>(j, "lane_count");
  road.lane_width = Field<double>(j, "lane_width");
  road.speed_limit = Field<double>(j, "speed_limit");
  road.friction_mu = Field<double>(j, "friction_mu");
  road.crosswalk_position = Field<double>(j, "crosswalk_position");
  road.crosswalk_width = Field<double>(j, "crosswalk_width");
  road.sidewalk_width = Field<double>(j, "sidewalk_width");
  return road;
}

}  // namespace

json ToJson(const Road& road) {
  return {{"length", road.length},
          {"lane_count", road.lane_count},
          {"lane_width", road.lane_width},
          {"speed_limit", road.speed_limit},
          {"friction_mu", road.friction_mu},
          {"crosswalk_position", road.crosswalk_position},
          {"crosswalk_width", road.crosswalk_width},
          {"sidewalk_width", road.sidewalk_width}};
}

json ToJson(const VehicleSpec& vehicle) {
  return {{"length", vehicle.length},
          {"width", vehicle.width},
          {"t_ramp_min", vehicle.t_ramp_min}};
}

json ToJson(const ParkedCar& car) {
  return {{"longitudinal_position", car.longitudinal_position},
          {"length", car.length},
          {"width", car.width},
          {"side", ToString(car.side)},
          {"lateral_offset", car.lateral_offset}};
}

json ToJson(const Pedestrian& p) {
  return {{"id", p.id},
          {"position", {p.position.x, p.position.y}},
          {"walking_speed", p.walking_speed},
          {"will_cross", p.will_cross},
          {"trigger_distance", p.trigger_distance},
          {"state", ToString(p.state)},
          {"start_side", ToString(p.start_side)}};
}

json ToJson(const EgoState& ego) {
  return {{"longitudinal_position", ego.longitudinal_position},
          {"velocity", ego.velocity},
          {"acceleration", ego.acceleration},
          {"previous_jerk", ego.previous_jerk}};
}

json ScenarioToJson(const WorldState& world, const ScenarioConfig* config) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  if (config != nullptr) {
    doc["family"] = ToString(config->family);
    doc["seed"] = config->seed;
  }
  doc["road"] = ToJson(world.road);
  doc["vehicle"] = ToJson(world.vehicle);
  doc["parked_cars"] = json::array();
  for (const ParkedCar& car : world.parked_cars) {
    doc["parked_cars"].push_back(ToJson(car));
  }
  doc["pedestrians"] = json::array();
  for (const Pedestrian& p : world.pedestrians) {
    doc["pedestrians"].push_back(ToJson(p));
  }
  doc["ego"] = ToJson(world.ego);
  doc["time"] = world.time;
  doc["tick"] = world.tick;
  return doc;
}

WorldState ScenarioFromJson(const json& doc) {
  const int version = Field<int>(doc, "schema_version");
  if (version != kScenarioSchemaVersion) {
    throw ConfigError("unsupported scenario schema_version " +
                      std::to_string(version));
  }
  WorldState world;
  world.road = RoadFromJson(Field<json>(doc, "road"));
  const json vehicle = Field<json>(doc, "vehicle");
  world.vehicle.length = Field<double>(vehicle, "length");
  world.vehicle.width = Field<double>(vehicle, "width");
  world.vehicle.t_ramp_min = Field<double>(vehicle, "t_ramp_min");
  for (const json& c : Field<json>(doc, "parked_cars")) {
    ParkedCar car;
    car.longitudinal_position = Field<double>(c, "longitudinal_position");
    car.length = Field<double>(c, "length");
    car.width = Field<double>(c, "width");
    car.side = ParseSide(Field<std::string>(c, "side"));
    car.lateral_offset = Field<double>(c, "lateral_offset");
    world.parked_cars.push_back(car);
  }
  for (const json& pj : Field<json>(doc, "pedestrians")) {
    Pedestrian p;
    p.id = Field<int>(pj, "id");
    const auto pos = Field<std::vector<double>>(pj, "position");
    if (pos.size() != 2) throw ConfigError("pedestrian position needs 2 values");
    p.position = {pos[0], pos[1]};
    p.walking_speed = Field<double>(pj, "walking_speed");
    p.will_cross = Field<bool>(pj, "will_cross");
    p.trigger_distance = Field<double>(pj, "trigger_distance");
    p.state = ParsePedestrianState(Field<std::string>(pj, "state"));
    p.start_side = ParseSide(Field<std::string>(pj, "start_side"));
    world.pedestrians.push_back(p);
  }
  const json ego = Field<json>(doc, "ego");
  world.ego.longitudinal_position = Field<double>(ego, "longitudinal_position");
  world.ego.velocity = Field<double>(ego, "velocity");
  world.ego.acceleration = Field<double>(ego, "acceleration");
  world.ego.previous_jerk = Field<double>(ego, "previous_jerk");
  world.time = Field<double>(doc, "time");
  world.tick = Field<std::int64_t>(doc, "tick");
  world.Validate();
  return world;
}

void WriteScenarioFile(const std::filesystem::path& path,
                       const WorldState& world, const ScenarioConfig* config) {
  const std::string text = ScenarioToJson(world, config).dump(2) + "\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

WorldState ReadScenarioFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("scenario file " + path.string() + ": " + e.what());
  }
  return ScenarioFromJson(doc);
}

}  // namespace occrisk
