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

#ifndef OCCRISK_PERCEPTION_H_
#define OCCRISK_PERCEPTION_H_

#include <optional>
#include <vector>

#include "occrisk/visibility.h"
#include "occrisk/world.h"

namespace occrisk {

struct SeenPedestrian {
  int id = 0;
  Vec2 position;
  double lateral_velocity = 0.0;
};

struct SeenParkedCar {
  int index = 0;
  double rear = 0.0;
  double front = 0.0;
  Vec2 reference;
};

/// What a controller is allowed to know on one tick: map constants, its own
/// state, and the objects the sensor labeled as visible. Hidden pedestrians
/// and cars never appear here.
struct Perception {
  Road road;
  VehicleSpec vehicle;
  EgoState ego;
  double r_visible = 0.0;
  std::vector<SeenPedestrian> pedestrians;
  std::vector<SeenParkedCar> parked_cars;
  std::optional<double> crosswalk_position;

  double EgoFront() const {
    return ego.longitudinal_position + 0.5 * vehicle.length;
  }
  double EgoRear() const {
    return ego.longitudinal_position - 0.5 * vehicle.length;
  }
};

Perception Perceive(const WorldState& world, const VisibilityResult& visibility,
                    const SensorSpec& sensor);

}  // namespace occrisk

#endif  // OCCRISK_PERCEPTION_H_
