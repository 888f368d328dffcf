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

#include "occrisk/world.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

namespace occrisk {
namespace {

void Require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

bool IsFinite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view ToString(Side side) {
  return side == Side::kRight ? "right" : "left";
}

std::string_view ToString(Family family) {
  switch (family) {
    case Family::kSc1:
      return "sc1";
    case Family::kSc2:
      return "sc2";
    case Family::kSc3:
      return "sc3";
  }
  return "sc1";
}

std::string_view ToString(PedestrianState state) {
  switch (state) {
    case PedestrianState::kWaiting:
      return "waiting";
    case PedestrianState::kCrossing:
      return "crossing";
    case PedestrianState::kCrossed:
      return "crossed";
    case PedestrianState::kHit:
      return "hit";
  }
  return "waiting";
}

Side ParseSide(std::string_view text) {
  if (text == "right") return Side::kRight;
  if (text == "left") return Side::kLeft;
  throw ConfigError("unknown side '" + std::string(text) + "'");
}

Family ParseFamily(std::string_view text) {
  if (text == "sc1") return Family::kSc1;
  if (text == "sc2") return Family::kSc2;
  if (text == "sc3") return Family::kSc3;
  throw ConfigError("unknown scenario family '" + std::string(text) +
                    "' (expected sc1, sc2 or sc3)");
}

PedestrianState ParsePedestrianState(std::string_view text) {
  if (text == "waiting") return PedestrianState::kWaiting;
  if (text == "crossing") return PedestrianState::kCrossing;
  if (text == "crossed") return PedestrianState::kCrossed;
  if (text == "hit") return PedestrianState::kHit;
  throw ConfigError("unknown pedestrian state '" + std::string(text) + "'");
}

double Road::SidewalkCenter(Side side) const {
  return side == Side::kRight ? -0.5 * sidewalk_width
                              : Width() + 0.5 * sidewalk_width;
}

void Road::Validate() const {
  Require(IsFinite(length) && length > 0.0, "road length must be > 0");
  Require(lane_count >= 1, "road lane_count must be >= 1");
  Require(IsFinite(lane_width) && lane_width > 0.0,
          "road lane_width must be > 0");
  Require(IsFinite(speed_limit) && speed_limit > 0.0,
          "road speed_limit must be > 0");
  Require(IsFinite(friction_mu) && friction_mu > 0.0 && friction_mu <= 1.2,
          "road friction_mu must lie in (0, 1.2]");
  Require(IsFinite(crosswalk_position) && crosswalk_position >= 0.0 &&
              crosswalk_position <= length,
          "crosswalk_position must lie in [0, length]");
  Require(IsFinite(crosswalk_width) && crosswalk_width > 0.0,
          "crosswalk_width must be > 0");
  Require(IsFinite(sidewalk_width) && sidewalk_width > 0.0,
          "sidewalk_width must be > 0");
}

Rect ParkedCar::Footprint(const Road& road) const {
  Rect r;
  r.min_x = longitudinal_position;
  r.max_x = longitudinal_position + length;
  if (side == Side::kRight) {
    r.min_y = lateral_offset;
    r.max_y = lateral_offset + width;
  } else {
    r.max_y = road.Width() - lateral_offset;
    r.min_y = r.max_y - width;
  }
  return r;
}

Vec2 ParkedCar::ReferencePoint(const Road& road) const {
  const Rect r = Footprint(road);
  const double y = side == Side::kRight ? r.max_y : r.min_y;
  return {0.5 * (r.min_x + r.max_x), y};
}

Rect WorldState::EgoFootprint() const {
  const double yc = road.EgoLaneCenter();
  return Rect{EgoRear(), yc - 0.5 * vehicle.width, EgoFront(),
              yc + 0.5 * vehicle.width};
}

void WorldState::Validate() const {
  road.Validate();
  Require(vehicle.length > 0.0 && vehicle.width > 0.0,
          "vehicle dimensions must be > 0");
  Require(vehicle.width <= road.lane_width, "vehicle wider than its lane");
  Require(vehicle.t_ramp_min >= 0.0, "vehicle t_ramp_min must be >= 0");
  for (std::size_t i = 0; i < parked_cars.size(); ++i) {
    const ParkedCar& car = parked_cars[i];
    Require(car.length > 0.0 && car.width > 0.0,
            "parked car " + std::to_string(i) + " has zero area");
    Require(car.lateral_offset >= 0.0 &&
                car.lateral_offset + car.width <= road.lane_width + 1e-12,
            "parked car " + std::to_string(i) + " outside its parking strip");
    Require(car.longitudinal_position >= 0.0 &&
                car.longitudinal_position + car.length <= road.length + 1e-12,
            "parked car " + std::to_string(i) + " outside the road");
    for (std::size_t k = i + 1; k < parked_cars.size(); ++k) {
      const ParkedCar& other = parked_cars[k];
      if (other.side != car.side) continue;
      const bool disjoint =
          other.longitudinal_position >= car.longitudinal_position + car.length ||
          car.longitudinal_position >= other.longitudinal_position + other.length;
      Require(disjoint, "parked cars " + std::to_string(i) + " and " +
                            std::to_string(k) + " overlap");
    }
  }
  for (const Pedestrian& p : pedestrians) {
    Require(p.walking_speed > 0.0, "pedestrian " + std::to_string(p.id) +
                                       " has non-positive walking speed");
    Require(IsFinite(p.position.x) && IsFinite(p.position.y),
            "pedestrian " + std::to_string(p.id) + " has non-finite position");
  }
  Require(ego.velocity >= 0.0, "ego velocity must be >= 0");
  Require(std::abs(ego.acceleration) <= road.MaxDeceleration() + 1e-9,
          "ego acceleration exceeds a_max");
}

void ScenarioConfig::Validate() const {
  road.Validate();
  Require(road.lane_count >= 3 && road.lane_count % 2 == 1,
          "scenario generation needs an odd lane_count >= 3 (parking strips "
          "on both sides of a middle travel lane)");
  Require(pedestrians.min >= 0 && pedestrians.min <= pedestrians.max,
          "pedestrian count range is degenerate");
  Require(parked_cars.min >= 0 && parked_cars.min <= parked_cars.max,
          "parked-car count range is degenerate");
  Require(non_crossing_fraction >= 0.0 && non_crossing_fraction <= 1.0,
          "non_crossing_fraction must lie in [0, 1]");
  Require(IsFinite(tick) && tick > 0.0, "tick must be > 0");
  Require(ego_initial_speed >= 0.0, "ego_initial_speed must be >= 0");
  Require(parking_slot_length > 0.0, "parking_slot_length must be > 0");
  Require(parked_car_min_length > 0.0 &&
              parked_car_min_length <= parked_car_max_length &&
              parked_car_max_length <= parking_slot_length,
          "parked car length range must fit in a slot");
  Require(parked_car_width > 0.0 && parked_car_lateral_offset >= 0.0 &&
              parked_car_width + parked_car_lateral_offset <= road.lane_width,
          "parked car must fit in its parking strip");
  Require(crosswalk_min_position >= 0.0 &&
              crosswalk_min_position <= crosswalk_max_position &&
              crosswalk_max_position <= road.length,
          "crosswalk band must lie on the road");
  Require(pedestrian_speed_mean > 0.0 && pedestrian_speed_std > 0.0,
          "pedestrian speed distribution must have positive mean and std");
  Require(trigger_min_distance >= 0.0 &&
              trigger_min_distance <= trigger_max_distance,
          "trigger distance band is degenerate");
  Require(behind_car_probability >= 0.0 && crosswalk_probability >= 0.0 &&
              behind_car_probability + crosswalk_probability <= 1.0,
          "placement probabilities must sum to <= 1");
  Require(pedestrian_min_position >= 0.0 &&
              pedestrian_min_position < road.length,
          "pedestrian_min_position must lie on the road");
  Require(vehicle.length > 0.0 && vehicle.width > 0.0 &&
              vehicle.width <= road.lane_width,
          "vehicle dimensions invalid");
}

ScenarioConfig DefaultScenarioConfig(Family family, std::uint64_t seed) {
  ScenarioConfig config;
  config.family = family;
  config.seed = seed;
  switch (family) {
    case Family::kSc1:
      config.pedestrians = {1, 2};
      config.parked_cars = {1, 2};
      break;
    case Family::kSc2:
      config.pedestrians = {4, 8};
      config.parked_cars = {6, 14};
      break;
    case Family::kSc3:
      config.pedestrians = {3, 6};
      config.parked_cars = {0, 0};  // unused: every slot is filled
      break;
  }
  return config;
}

std::vector<double> ParkingSlotStarts(const Road& road, double slot_length) {
  constexpr double kCrosswalkClearance = 1.0;
  const double cw_lo =
      road.crosswalk_position - 0.5 * road.crosswalk_width - kCrosswalkClearance;
  const double cw_hi =
      road.crosswalk_position + 0.5 * road.crosswalk_width + kCrosswalkClearance;
  std::vector<double> starts;
  for (double s = 0.0; s + slot_length <= road.length + 1e-9;
       s += slot_length) {
    const bool overlaps = s < cw_hi && s + slot_length > cw_lo;
    if (!overlaps) starts.push_back(s);
  }
  return starts;
}

WorldState GenerateScenario(const ScenarioConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  WorldState world;
  world.road = config.road;
  world.vehicle = config.vehicle;
  world.road.crosswalk_position =
      uniform(config.crosswalk_min_position, config.crosswalk_max_position);

  const std::vector<double> slots =
      ParkingSlotStarts(world.road, config.parking_slot_length);
  std::vector<std::pair<Side, double>> candidates;
  for (Side side : {Side::kRight, Side::kLeft}) {
    for (double s : slots) candidates.emplace_back(side, s);
  }
  std::size_t car_count = candidates.size();
  if (config.family != Family::kSc3) {
    car_count = std::min<std::size_t>(
        candidates.size(),
        static_cast<std::size_t>(
            uniform_int(config.parked_cars.min, config.parked_cars.max)));
    // Partial Fisher-Yates; std::shuffle's exact sequence is unspecified.
    for (std::size_t i = 0; i < car_count; ++i) {
      const auto j = static_cast<std::size_t>(uniform_int(
          static_cast<int>(i), static_cast<int>(candidates.size()) - 1));
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(car_count);
    std::sort(candidates.begin(), candidates.end());
  }
  for (const auto& [side, start] : candidates) {
    ParkedCar car;
    car.side = side;
    car.length =
        uniform(config.parked_car_min_length, config.parked_car_max_length);
    car.width = config.parked_car_width;
    car.lateral_offset = config.parked_car_lateral_offset;
    car.longitudinal_position =
        start + uniform(0.0, config.parking_slot_length - car.length);
    world.parked_cars.push_back(car);
  }

  const int pedestrian_count =
      uniform_int(config.pedestrians.min, config.pedestrians.max);
  const double x_max = world.road.length - 2.0;
  for (int id = 0; id < pedestrian_count; ++id) {
    Pedestrian p;
    p.id = id;
    p.start_side = uniform(0.0, 1.0) < 0.5 ? Side::kRight : Side::kLeft;
    std::vector<const ParkedCar*> same_side;
    for (const ParkedCar& car : world.parked_cars) {
      if (car.side == p.start_side &&
          car.longitudinal_position + car.length > config.pedestrian_min_position)
        same_side.push_back(&car);
    }
    const double placement = uniform(0.0, 1.0);
    double x = 0.0;
    if (placement < config.behind_car_probability && !same_side.empty()) {
      const ParkedCar& car = *same_side[static_cast<std::size_t>(
          uniform_int(0, static_cast<int>(same_side.size()) - 1))];
      x = uniform(std::max(car.longitudinal_position,
                           config.pedestrian_min_position),
                  car.longitudinal_position + car.length);
    } else if (placement < config.behind_car_probability +
                               config.crosswalk_probability) {
      const double half = 0.5 * world.road.crosswalk_width;
      x = world.road.crosswalk_position + uniform(-half, half);
    } else {
      x = uniform(config.pedestrian_min_position, x_max);
    }
    const double lateral_spread = 0.3 * world.road.sidewalk_width;
    p.position = {x, world.road.SidewalkCenter(p.start_side) +
                         uniform(-lateral_spread, lateral_spread)};
    p.walking_speed = SampleWalkingSpeed(rng, config.pedestrian_speed_mean,
                                         config.pedestrian_speed_std);
    p.will_cross = uniform(0.0, 1.0) >= config.non_crossing_fraction;
    p.trigger_distance =
        uniform(config.trigger_min_distance, config.trigger_max_distance);
    world.pedestrians.push_back(p);
  }

  world.ego.longitudinal_position = 0.0;
  world.ego.velocity = config.ego_initial_speed;
  world.Validate();
  return world;
}

WorldState StepWorld(const WorldState& world, double ego_accel_command,
                     double dt) {
  WorldState next = world;
  const double a_max = world.road.MaxDeceleration();
  const double accel = std::clamp(ego_accel_command, -a_max, a_max);
  EgoState& ego = next.ego;
  ego.previous_jerk = (accel - world.ego.acceleration) / dt;
  ego.acceleration = accel;
  ego.longitudinal_position = world.ego.longitudinal_position +
                              dt * world.ego.velocity;
  ego.velocity = std::max(0.0, world.ego.velocity + dt * accel);

  const double ego_front = world.EgoFront();
  for (Pedestrian& p : next.pedestrians) {
    if (p.state == PedestrianState::kWaiting && p.will_cross &&
        p.position.x - ego_front <= p.trigger_distance) {
      p.state = PedestrianState::kCrossing;
    }
    if (p.state != PedestrianState::kCrossing) continue;
    const Side target_side =
        p.start_side == Side::kRight ? Side::kLeft : Side::kRight;
    const double target_y = next.road.SidewalkCenter(target_side);
    const double dir = p.CrossingDirection();
    p.position.y += dir * p.walking_speed * dt;
    if (dir * (p.position.y - target_y) >= 0.0) {
      p.position.y = target_y;
      p.state = PedestrianState::kCrossed;
    }
  }
  next.time = world.time + dt;
  next.tick = world.tick + 1;
  return next;
}

std::optional<int> DetectCollision(const WorldState& world) {
  const Rect footprint = world.EgoFootprint();
  std::optional<int> hit;
  for (const Pedestrian& p : world.pedestrians) {
    if (p.state == PedestrianState::kHit) continue;
    if (footprint.Contains(p.position, 0.0) && (!hit || p.id < *hit)) {
      hit = p.id;
    }
  }
  return hit;
}

}  // namespace occrisk
