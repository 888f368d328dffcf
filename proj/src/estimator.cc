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

#include "occrisk/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occrisk {

void EstimatorParams::Validate() const {
  for (double w : weights.w) {
    if (!std::isfinite(w)) throw ConfigError("emergence weights must be finite");
  }
  if (!(density_window > 0.0)) {
    throw ConfigError("estimator density_window must be > 0");
  }
  if (!(car_saturation > 0.0) || !(pedestrian_saturation > 0.0)) {
    throw ConfigError("estimator saturation counts must be > 0");
  }
}

Observation BuildObservation(const Perception& scene, double query_point,
                             const EstimatorParams& params) {
  const double range = scene.r_visible;
  auto normalized = [range](double distance) {
    return std::min(distance, range) / range;
  };

  Observation obs;
  int cars_in_window = 0;
  double nearest_car = std::numeric_limits<double>::infinity();
  for (const SeenParkedCar& car : scene.parked_cars) {
    const double gap =
        std::max({0.0, car.rear - query_point, query_point - car.front});
    if (gap <= params.density_window) ++cars_in_window;
    nearest_car = std::min(nearest_car, gap);
  }
  int pedestrians_in_window = 0;
  double nearest_pedestrian = std::numeric_limits<double>::infinity();
  for (const SeenPedestrian& p : scene.pedestrians) {
    const double gap = std::abs(p.position.x - query_point);
    if (gap <= params.density_window) ++pedestrians_in_window;
    nearest_pedestrian = std::min(nearest_pedestrian, gap);
  }

  obs.n1 = std::min(1.0, cars_in_window / params.car_saturation);
  obs.n2 = std::min(1.0, pedestrians_in_window / params.pedestrian_saturation);
  if (scene.crosswalk_position) {
    obs.d1 = normalized(std::abs(*scene.crosswalk_position - query_point));
  }
  if (!scene.parked_cars.empty()) obs.d2 = normalized(nearest_car);
  if (!scene.pedestrians.empty()) obs.d3 = normalized(nearest_pedestrian);
  return obs;
}

Observation BuildObservation(const VisibilityResult& visibility,
                             const WorldState& world, const SensorSpec& sensor,
                             double query_point,
                             const EstimatorParams& params) {
  return BuildObservation(Perceive(world, visibility, sensor), query_point,
                          params);
}

double EmergenceProbability(const Observation& obs,
                            const EmergenceWeights& weights) {
  const auto z = obs.AsArray();
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += weights.w[i] * z[i];
  const double p = 1.0 / (1.0 + std::exp(-s));
  return std::clamp(p, std::numeric_limits<double>::min(),
                    std::nextafter(1.0, 0.0));
}

}  // namespace occrisk
