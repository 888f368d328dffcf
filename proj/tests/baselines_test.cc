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

#include "occrisk/baselines.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "occrisk/harness.h"

namespace occrisk {
namespace {

Perception Scene(double x, double v) {
  Perception scene;
  scene.r_visible = 40.0;
  scene.ego.longitudinal_position = x;
  scene.ego.velocity = v;
  return scene;
}

TEST(Baselines, SpeedLimitOnEmptyRoad) {
  SpeedLimitBaseline b1{ControllerContext{}};
  const Decision d = b1.Step(Scene(0.0, 5.0));
  EXPECT_EQ(d.command.fsm_state, FsmState::kNormalDrive);
  EXPECT_NEAR(d.command.v_ref, 8.333, 1e-3);
  EXPECT_FALSE(d.scan.has_value());
  EXPECT_EQ(b1.name(), "B1");
}

TEST(Baselines, ReducedSpeedOnEmptyRoad) {
  ReducedSpeedBaseline b2{ControllerContext{}};
  EXPECT_NEAR(b2.Step(Scene(0.0, 5.0)).command.v_ref, 5.556, 1e-3);
  EXPECT_EQ(b2.name(), "B2");
}

TEST(Baselines, CrosswalkBaselineSlowsNearVisibleCrosswalk) {
  CrosswalkBaseline b3{ControllerContext{}, 20.0};
  Perception scene = Scene(10.0, 8.0);
  scene.crosswalk_position = scene.EgoFront() + 15.0;
  EXPECT_NEAR(b3.Step(scene).command.v_ref, 2.778, 1e-3);
}

TEST(Baselines, CrosswalkBaselineIgnoresFarCrosswalk) {
  CrosswalkBaseline b3{ControllerContext{}, 20.0};
  Perception scene = Scene(10.0, 8.0);
  scene.crosswalk_position = scene.EgoFront() + 30.0;
  EXPECT_NEAR(b3.Step(scene).command.v_ref, 8.333, 1e-3);
}

TEST(Baselines, CrosswalkBaselineResumesAfterPassing) {
  CrosswalkBaseline b3{ControllerContext{}, 20.0};
  Perception scene = Scene(10.0, 3.0);
  const double crosswalk = scene.EgoFront() + 10.0;
  scene.crosswalk_position = crosswalk;
  EXPECT_NEAR(b3.Step(scene).command.v_ref, 2.778, 1e-3);
  // Crosswalk out of view while on it: still slow.
  Perception on = Scene(crosswalk, 3.0);
  EXPECT_NEAR(b3.Step(on).command.v_ref, 2.778, 1e-3);
  Perception past = Scene(crosswalk + 10.0, 3.0);
  EXPECT_NEAR(b3.Step(past).command.v_ref, 8.333, 1e-3);
}

TEST(Baselines, NeverReadEmergenceEstimates) {
  ControllerContext a, b;
  b.estimator.weights.w = {50.0, 50.0, 50.0, 50.0, 50.0, 50.0};
  Perception scene = Scene(10.0, 8.0);
  scene.parked_cars = {{0, 20.0, 24.5, {22.25, 2.1}}};
  scene.crosswalk_position = 40.0;
  for (const char* name : {"B1", "B2", "B3"}) {
    SimulationConfig ca, cb;
    ca.controller = a;
    cb.controller = b;
    auto x = MakeController(name, ca);
    auto y = MakeController(name, cb);
    for (int k = 0; k < 20; ++k) {
      const Decision dx = x->Step(scene);
      const Decision dy = y->Step(scene);
      EXPECT_EQ(dx.command.accel_out, dy.command.accel_out);
      EXPECT_EQ(dx.command.fsm_state, dy.command.fsm_state);
    }
  }
}

TEST(Baselines, SameYieldBehaviorAsProposedWhileScanStaysNormal) {
  // With a strongly negative bias the proposed scan never leaves
  // NormalDrive, so it must act exactly like B1.
  SimulationConfig config;
  config.controller.estimator.weights.w = {-30.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  int yielding_episodes = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const ScenarioConfig scenario = DefaultScenarioConfig(Family::kSc2, seed);
    const EpisodeRecord p = RunEpisode(scenario, config, "proposed");
    const EpisodeRecord b = RunEpisode(scenario, config, "B1");
    ASSERT_EQ(p.trace.size(), b.trace.size()) << "seed " << seed;
    bool yielded = false;
    for (std::size_t k = 0; k < p.trace.size(); ++k) {
      const TraceTick& tp = p.trace[k];
      const TraceTick& tb = b.trace[k];
      ASSERT_TRUE(!tp.scan || !tp.scan->deciding_zone);
      EXPECT_EQ(tp.command.fsm_state, tb.command.fsm_state);
      EXPECT_EQ(tp.command.accel_out, tb.command.accel_out);
      EXPECT_EQ(tp.yield_target.has_value(), tb.yield_target.has_value());
      yielded |= tp.command.fsm_state == FsmState::kYielding;
    }
    EXPECT_EQ(p.outcome, b.outcome);
    EXPECT_EQ(p.successful_yields, b.successful_yields);
    EXPECT_EQ(p.unsuccessful_yields, b.unsuccessful_yields);
    yielding_episodes += yielded;
  }
  EXPECT_GT(yielding_episodes, 0);
}

}  // namespace
}  // namespace occrisk
