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

#ifndef OCCRISK_ESTIMATOR_H_
#define OCCRISK_ESTIMATOR_H_

#include <array>

#include "occrisk/perception.h"
#include "occrisk/visibility.h"
#include "occrisk/world.h"

namespace occrisk {

/// Observation vector [1, n1, n2, d1, d2, d3]: bias, parked-car density,
/// visible-pedestrian density, and normalized distances to the crosswalk,
/// the closest parked car and the closest visible pedestrian. Everything
/// except the bias lies in [0, 1]; nothing observed gives [1, 0, 0, 1, 1, 1].
struct Observation {
  double bias = 1.0;
  double n1 = 0.0;
  double n2 = 0.0;
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;

  friend bool operator==(const Observation&, const Observation&) = default;

  std::array<double, 6> AsArray() const { return {bias, n1, n2, d1, d2, d3}; }
};

/// One weight per observation component. Density weights are positive and
/// distance weights negative in the default orientation. The defaults are
/// hand-set: about 0.1 in open road, 0.8 with a parked car at the query point.
struct EmergenceWeights {
  std::array<double, 6> w{4.8, 2.0, 1.5, -2.0, -3.0, -2.0};

  friend bool operator==(const EmergenceWeights&,
                         const EmergenceWeights&) = default;
};

struct EstimatorParams {
  EmergenceWeights weights;
  /// Objects within this longitudinal radius of the query point count toward
  /// the densities.
  double density_window = 10.0;
  double car_saturation = 4.0;
  double pedestrian_saturation = 4.0;

  friend bool operator==(const EstimatorParams&,
                         const EstimatorParams&) = default;

  void Validate() const;
};

/// Builds the observation at longitudinal road position `query_point`.
/// Distances are longitudinal and normalized by the sensing range.
Observation BuildObservation(const Perception& scene, double query_point,
                             const EstimatorParams& params);

Observation BuildObservation(const VisibilityResult& visibility,
                             const WorldState& world, const SensorSpec& sensor,
                             double query_point, const EstimatorParams& params);

/// Logistic of the weighted observation, kept strictly inside (0, 1).
double EmergenceProbability(const Observation& obs,
                            const EmergenceWeights& weights);

}  // namespace occrisk

#endif  // OCCRISK_ESTIMATOR_H_
