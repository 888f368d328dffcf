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

#include "occrisk/perception.h"

#include <algorithm>

namespace occrisk {

Perception Perceive(const WorldState& world, const VisibilityResult& visibility,
                    const SensorSpec& sensor) {
  Perception scene;
  scene.road = world.road;
  scene.vehicle = world.vehicle;
  scene.ego = world.ego;
  scene.r_visible = sensor.r_visible;
  for (const Pedestrian& p : world.pedestrians) {
    if (!std::binary_search(visibility.visible_pedestrian_ids.begin(),
                            visibility.visible_pedestrian_ids.end(), p.id)) {
      continue;
    }
    scene.pedestrians.push_back({p.id, p.position, p.LateralVelocity()});
  }
  for (int index : visibility.visible_parked_car_indices) {
    const ParkedCar& car = world.parked_cars[static_cast<std::size_t>(index)];
    scene.parked_cars.push_back({index, car.longitudinal_position,
                                 car.longitudinal_position + car.length,
                                 car.ReferencePoint(world.road)});
  }
  if (visibility.crosswalk_visible) {
    scene.crosswalk_position = world.road.crosswalk_position;
  }
  return scene;
}

}  // namespace occrisk
