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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "occrisk/controller.h"

namespace occrisk {
namespace {

Perception EmptyScene() {
  Perception scene;
  scene.r_visible = 40.0;
  scene.ego.longitudinal_position = 10.0;
  return scene;
}

SeenParkedCar Car(double rear) {
  return {0, rear, rear + 4.5, {rear + 2.25, 2.1}};
}

TEST(BuildObservation, EmptySceneIsUnobservable) {
  const Observation obs = BuildObservation(EmptyScene(), 30.0, {});
  EXPECT_EQ(obs, (Observation{1.0, 0.0, 0.0, 1.0, 1.0, 1.0}));
}

TEST(BuildObservation, EmptyVisibilityResultIsUnobservable) {
  WorldState w;
  const VisibilityResult none;
  const Observation obs = BuildObservation(none, w, SensorSpec{}, 20.0, {});
  EXPECT_EQ(obs, (Observation{1.0, 0.0, 0.0, 1.0, 1.0, 1.0}));
}

TEST(BuildObservation, ZeroDistancesAtQueryPoint) {
  Perception scene = EmptyScene();
  scene.crosswalk_position = 30.0;
  scene.pedestrians.push_back({0, {30.0, -1.0}, 0.0});
  const Observation obs = BuildObservation(scene, 30.0, {});
  EXPECT_EQ(obs.d1, 0.0);
  EXPECT_EQ(obs.d3, 0.0);
  EXPECT_EQ(obs.n2, 0.25);
}

TEST(BuildObservation, TwoCarsInWindowGiveHalfDensity) {
  Perception scene = EmptyScene();
  scene.parked_cars = {Car(22.0), Car(33.0)};
  const Observation obs = BuildObservation(scene, 30.0, {});
  EXPECT_DOUBLE_EQ(obs.n1, 0.5);
  EXPECT_DOUBLE_EQ(obs.d2, 3.0 / 40.0);
}

TEST(BuildObservation, DistancesCapAtRange) {
  Perception scene = EmptyScene();
  scene.crosswalk_position = 95.0;
  const Observation obs = BuildObservation(scene, 20.0, {});
  EXPECT_EQ(obs.d1, 1.0);
}

TEST(BuildObservation, DensitySaturates) {
  Perception scene = EmptyScene();
  for (int i = 0; i < 7; ++i) {
    scene.pedestrians.push_back({i, {30.0 + i, -1.0}, 0.0});
  }
  EXPECT_EQ(BuildObservation(scene, 30.0, {}).n2, 1.0);
}

TEST(EmergenceProbability, ClosedFormValues) {
  EmergenceWeights zero;
  zero.w.fill(0.0);
  EXPECT_DOUBLE_EQ(EmergenceProbability({}, zero), 0.5);
  EmergenceWeights bias_only;
  bias_only.w = {std::log(3.0), 0, 0, 0, 0, 0};
  EXPECT_NEAR(EmergenceProbability({}, bias_only), 0.75, 1e-15);
}

TEST(EmergenceProbability, DefaultWeightsMatchScalarEvaluation) {
  const Observation obs{1.0, 0.5, 0.25, 0.2, 0.1, 0.3};
  // 4.8 + 2.0*0.5 + 1.5*0.25 - 2.0*0.2 - 3.0*0.1 - 2.0*0.3 = 4.875
  const long double s = 4.875L;
  const double expected = static_cast<double>(1.0L / (1.0L + std::exp(-s)));
  EXPECT_NEAR(EmergenceProbability(obs, EmergenceWeights{}), expected, 1e-12);
}

TEST(EmergenceProbability, DefaultWeightsHonorThresholdOrientation) {
  const PolicyThresholds policy;
  // Unobservable: below the cautious threshold of either zone.
  EXPECT_LT(EmergenceProbability({}, EmergenceWeights{}),
            policy.danger.l_cautious);
  // Dense parked cars right at a crosswalk: above the steady threshold.
  const Observation dense{1.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  EXPECT_GT(EmergenceProbability(dense, EmergenceWeights{}),
            policy.discomfort.l_steady);
}

TEST(EmergenceProbability, MonotoneInEachComponent) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const EmergenceWeights w;
  for (int i = 0; i < 2000; ++i) {
    Observation a{1.0, u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double base = EmergenceProbability(a, w);
    const double bump = u(rng) * 0.5;
    Observation b = a;
    b.n1 = std::min(1.0, a.n1 + bump);
    EXPECT_GE(EmergenceProbability(b, w), base);
    b = a;
    b.n2 = std::min(1.0, a.n2 + bump);
    EXPECT_GE(EmergenceProbability(b, w), base);
    b = a;
    b.d1 = std::min(1.0, a.d1 + bump);
    EXPECT_LE(EmergenceProbability(b, w), base);
    b = a;
    b.d2 = std::min(1.0, a.d2 + bump);
    EXPECT_LE(EmergenceProbability(b, w), base);
    b = a;
    b.d3 = std::min(1.0, a.d3 + bump);
    EXPECT_LE(EmergenceProbability(b, w), base);
  }
}

TEST(EmergenceProbability, StrictlyInsideUnitInterval) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> big(-1e3, 1e3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    EmergenceWeights w;
    for (double& x : w.w) x = big(rng);
    const Observation obs{1.0, u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double p = EmergenceProbability(obs, w);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(EstimatorParams, RejectsNonFiniteWeights) {
  EstimatorParams p;
  p.weights.w[2] = std::nan("");
  EXPECT_THROW(p.Validate(), ConfigError);
  p = EstimatorParams{};
  p.density_window = 0.0;
  EXPECT_THROW(p.Validate(), ConfigError);
}

}  // namespace
}  // namespace occrisk
