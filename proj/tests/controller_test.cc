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

#include "occrisk/controller.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "test_oracles.h"

namespace occrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Perception Scene(double x, double v) {
  Perception scene;
  scene.r_visible = 40.0;
  scene.ego.longitudinal_position = x;
  scene.ego.velocity = v;
  return scene;
}

// Pedestrian walking from the right sidewalk toward the lane.
SeenPedestrian Walker(int id, double x, double y = -1.0, double vy = 1.5) {
  return {id, {x, y}, vy};
}

ControllerContext Context() { return ControllerContext{}; }

TEST(TimeToCollision, GapOverSpeed) {
  const Perception scene = Scene(10.0, 5.0);
  EXPECT_DOUBLE_EQ(TimeToCollision(scene, scene.EgoFront() + 10.0), 2.0);
}

TEST(TimeToCollision, StoppedEgoNeverArrives) {
  const Perception scene = Scene(10.0, 0.0);
  EXPECT_EQ(TimeToCollision(scene, 30.0), kInf);
}

TEST(TimeToCollision, PedestrianBehindEgo) {
  const Perception scene = Scene(20.0, 5.0);
  EXPECT_EQ(TimeToCollision(scene, 10.0), kInf);
}

TEST(IsInPath, StandingOnSidewalkIsNotInPath) {
  const Perception scene = Scene(10.0, 8.0);
  EXPECT_FALSE(IsInPath(scene, Walker(0, 30.0, -1.0, 0.0), {}));
}

TEST(IsInPath, WalkingTowardLaneAheadIsInPath) {
  const Perception scene = Scene(10.0, 8.0);
  EXPECT_TRUE(IsInPath(scene, Walker(0, 30.0), {}));
}

TEST(IsInPath, StandingInLaneAheadIsInPath) {
  const Perception scene = Scene(10.0, 8.0);
  EXPECT_TRUE(
      IsInPath(scene, Walker(0, 30.0, scene.road.EgoLaneCenter(), 0.0), {}));
}

TEST(IsInPath, PedestrianBehindIsIgnored) {
  const Perception scene = Scene(30.0, 8.0);
  EXPECT_FALSE(IsInPath(scene, Walker(0, 20.0), {}));
}

TEST(IsInPath, WalkingAwayAfterCrossingIsIgnored) {
  const Perception scene = Scene(10.0, 8.0);
  const double beyond = scene.road.EgoLaneCenter() + 3.0;
  EXPECT_FALSE(IsInPath(scene, Walker(0, 30.0, beyond, 1.5), {}));
}

TEST(IsInPath, FarWalkerReachesLaneAfterEgoHasPassed) {
  // 60 s to reach the lane; the ego clears x = 14 m within a second.
  const Perception scene = Scene(10.0, 8.0);
  EXPECT_FALSE(IsInPath(scene, Walker(0, 14.0, -1.0, 0.05), {}));
}

TEST(IsInPath, VerdictSurvivesStopping) {
  Perception scene = Scene(10.0, 8.0);
  const SeenPedestrian p = Walker(0, 25.0);
  ASSERT_TRUE(IsInPath(scene, p, {}));
  scene.ego.velocity = 0.0;
  EXPECT_TRUE(IsInPath(scene, p, {}));
}

TEST(FindYieldTarget, ClosestThenLowestId) {
  Perception scene = Scene(10.0, 8.0);
  scene.pedestrians = {Walker(5, 40.0), Walker(3, 30.0), Walker(1, 30.0)};
  const auto target = FindYieldTarget(scene, {});
  ASSERT_TRUE(target.has_value());
  EXPECT_EQ(target->pedestrian_id, 1);
  EXPECT_DOUBLE_EQ(target->gap, 30.0 - scene.EgoFront());
}

TEST(Track, CruiseExampleClampsScaledJerk) {
  ControlCommand cmd;
  cmd.fsm_state = FsmState::kNormalDrive;
  cmd.a_limit = 2.0;
  cmd.j_limit = 0.9;
  TrackingReference ref;
  ref.v_ref = 8.33;
  const GainSet g;
  // j = 0.9 * 0.9047 * 3.33 = 2.71 exceeds 0.9, so a = 0 + 0.1 * 0.9.
  const double a = Track(cmd, 5.0, 0.0, ref, g, 0.1);
  const double raw = g.j_cruise * g.k_cruise(0) * (8.33 - 5.0);
  EXPECT_GT(raw, cmd.j_limit);
  EXPECT_NEAR(a, 0.09, 1e-12);
  EXPECT_GT(a, 0.0);
}

TEST(Track, ZeroErrorHoldsZero) {
  ControlCommand cmd;
  cmd.a_limit = 2.0;
  cmd.j_limit = 0.9;
  TrackingReference ref;
  ref.v_ref = 5.0;
  EXPECT_EQ(Track(cmd, 5.0, 0.0, ref, GainSet{}, 0.1), 0.0);
}

TEST(Track, ZeroErrorDecaysAcceleration) {
  ControlCommand cmd;
  cmd.a_limit = 2.0;
  cmd.j_limit = 0.9;
  TrackingReference ref;
  ref.v_ref = 5.0;
  const double a = Track(cmd, 5.0, 0.5, ref, GainSet{}, 0.1);
  EXPECT_LT(a, 0.5);
  EXPECT_GT(a, 0.0);
}

TEST(Track, StepResponseConverges) {
  ControlCommand cmd;
  cmd.a_limit = 2.0;
  cmd.j_limit = 0.9;
  TrackingReference ref;
  ref.v_ref = 8.33;
  double v = 0.0, a = 0.0;
  int settled_at = -1;
  for (int k = 0; k < 1200; ++k) {
    const double next = Track(cmd, v, a, ref, GainSet{}, 0.1);
    EXPECT_LE(std::abs(next - a), 0.09 + 1e-12);
    EXPECT_LE(std::abs(next), 2.0);
    a = next;
    v = std::max(0.0, v + 0.1 * a);
    if (std::abs(v - ref.v_ref) < 0.1) {
      if (settled_at < 0) settled_at = k;
    } else {
      settled_at = -1;
    }
  }
  EXPECT_GE(settled_at, 0);
}

TEST(Track, EmergencyRampsToFullBraking) {
  ControlCommand cmd;
  cmd.fsm_state = FsmState::kEmergency;
  cmd.a_limit = 7.848;
  cmd.j_limit = 7.848 / 0.3;
  double a = 0.0;
  for (int k = 0; k < 5; ++k) {
    a = Track(cmd, 8.0, a, {}, GainSet{}, 0.1);
  }
  EXPECT_NEAR(a, -7.848, 1e-12);
  EXPECT_NEAR(Track(cmd, 8.0, 0.0, {}, GainSet{}, 0.1), -7.848 / 3.0, 1e-12);
}

TEST(Track, YieldStopsNearReferenceDistance) {
  ControlCommand cmd;
  cmd.fsm_state = FsmState::kYielding;
  cmd.a_limit = 7.848;
  cmd.j_limit = 2.0;
  double gap = 30.0, v = 6.0, a = 0.0;
  for (int k = 0; k < 600; ++k) {
    TrackingReference ref;
    ref.distance = gap;
    ref.distance_ref = 3.0;
    a = Track(cmd, v, a, ref, GainSet{}, 0.1);
    gap -= 0.1 * v;
    v = std::max(0.0, v + 0.1 * a);
  }
  EXPECT_LT(v, 0.05);
  EXPECT_GT(gap, 0.0);
}

// Scan and drive-state choice.

TEST(ScanRisk, ZeroWeightsForceCautious) {
  PolicyThresholds policy;
  policy.danger.l_cautious = policy.discomfort.l_cautious = 0.4;
  policy.danger.l_steady = policy.discomfort.l_steady = 0.6;
  ControllerContext ctx;
  ctx.policy = policy;
  ctx.estimator.weights.w.fill(0.0);
  ProposedController controller(ctx);
  const Decision d = controller.Step(Scene(10.0, 8.0));
  EXPECT_EQ(d.command.fsm_state, FsmState::kCautiousDrive);
  EXPECT_DOUBLE_EQ(d.command.v_ref, policy.alpha2 * Road{}.speed_limit);
}

TEST(ScanRisk, QuietRoadIsNormalDrive) {
  ProposedController controller(Context());
  const Decision d = controller.Step(Scene(10.0, 8.0));
  EXPECT_EQ(d.command.fsm_state, FsmState::kNormalDrive);
  EXPECT_DOUBLE_EQ(d.command.v_ref, Road{}.speed_limit);
  ASSERT_TRUE(d.scan.has_value());
  EXPECT_FALSE(d.scan->deciding_zone.has_value());
}

TEST(ScanRisk, ParkedCarsAheadSlowDown) {
  Perception scene = Scene(10.0, 8.0);
  scene.parked_cars = {{0, 20.0, 24.5, {22.25, 2.1}},
                       {1, 26.0, 30.5, {28.25, 2.1}}};
  ProposedController controller(Context());
  const Decision d = controller.Step(scene);
  EXPECT_EQ(d.command.fsm_state, FsmState::kSteadyDrive);
  EXPECT_DOUBLE_EQ(d.command.v_ref,
                   PolicyThresholds{}.alpha1 * scene.road.speed_limit);
}

TEST(ScanRisk, MatchesMaterializedReference) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double steps[] = {0.25, 0.5, 1.0, 2.0};
  const auto physical = PhysicalBraking(Road{}, VehicleSpec{});
  for (int i = 0; i < 2000; ++i) {
    Perception scene = Scene(80.0 * u(rng), 12.0 * u(rng));
    const double front = scene.EgoFront();
    const int cars = static_cast<int>(u(rng) * 5);
    for (int c = 0; c < cars; ++c) {
      const double rear = front + 40.0 * u(rng) - 5.0;
      scene.parked_cars.push_back({c, rear, rear + 4.5, {rear + 2.25, 2.1}});
    }
    const int peds = static_cast<int>(u(rng) * 4);
    for (int p = 0; p < peds; ++p) {
      scene.pedestrians.push_back(Walker(p, front + 40.0 * u(rng), -1.0, 0.0));
    }
    if (u(rng) < 0.5) scene.crosswalk_position = front + 40.0 * u(rng);

    PolicyThresholds policy;
    policy.delta_d = steps[i % 4];
    policy.danger.l_cautious = 0.5 * u(rng);
    policy.danger.l_steady = policy.danger.l_cautious + 0.5 * u(rng) + 1e-3;
    policy.discomfort.l_cautious = 0.5 * u(rng);
    policy.discomfort.l_steady =
        policy.discomfort.l_cautious + 0.5 * u(rng) + 1e-3;
    EstimatorParams est;
    for (double& w : est.weights.w) w = 6.0 * u(rng) - 3.0;

    const RiskZones zones = ComputeRiskZones(scene.ego.velocity,
                                             BrakingProfile{}, physical, 40.0);
    const ScanResult got = ScanRisk(scene, zones, policy, est);
    const ScanResult want = testing::ReferenceScan(scene, zones, policy, est);
    EXPECT_EQ(got.state, want.state) << "case " << i;
    EXPECT_EQ(got.deciding_zone, want.deciding_zone) << "case " << i;
    EXPECT_NEAR(got.danger_max, want.danger_max, 1e-12) << "case " << i;
    EXPECT_NEAR(got.discomfort_max, want.discomfort_max, 1e-12);
    EXPECT_EQ(got.reached_discomfort, want.reached_discomfort);
    EXPECT_EQ(got.points, want.points) << "case " << i;
  }
}

TEST(ScanRisk, StationaryEgoScansOnePoint) {
  const auto physical = PhysicalBraking(Road{}, VehicleSpec{});
  const RiskZones zones =
      ComputeRiskZones(0.0, BrakingProfile{}, physical, 40.0);
  EXPECT_EQ(ScanRisk(Scene(10.0, 0.0), zones, {}, {}).points, 1);
}

// Yield and emergency.

TEST(Controller, InPathPedestrianFarAheadIsYielded) {
  Perception scene = Scene(10.0, 8.0);
  scene.pedestrians = {Walker(2, 40.0)};
  ProposedController controller(Context());
  const Decision d = controller.Step(scene);
  EXPECT_EQ(d.command.fsm_state, FsmState::kYielding);
  EXPECT_EQ(d.event, FsmEvent::kE5);
  ASSERT_TRUE(d.yield_target.has_value());
  EXPECT_EQ(d.yield_target->pedestrian_id, 2);
}

TEST(Controller, InPathPedestrianWithShortTtcTriggersEmergency) {
  Perception scene = Scene(10.0, 8.0);
  scene.pedestrians = {
      Walker(2, scene.EgoFront() + 6.0, scene.road.EgoLaneCenter(), 0.0)};
  ProposedController controller(Context());
  const Decision d = controller.Step(scene);
  EXPECT_EQ(d.command.fsm_state, FsmState::kEmergency);
  EXPECT_EQ(d.event, FsmEvent::kE8);
  EXPECT_DOUBLE_EQ(d.command.a_limit, scene.road.MaxDeceleration());
}

TEST(Controller, EmergencyDominatesScanOutput) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    ControllerContext ctx;
    for (double& w : ctx.estimator.weights.w) w = 10.0 * u(rng) - 5.0;
    ProposedController controller(ctx);
    Perception scene = Scene(20.0, 2.0 + 8.0 * u(rng));
    scene.ego.acceleration = 4.0 * u(rng) - 2.0;
    for (int c = 0; c < 3; ++c) {
      const double rear = 20.0 + 30.0 * u(rng);
      scene.parked_cars.push_back({c, rear, rear + 4.5, {rear + 2.25, 2.1}});
    }
    const double gap = scene.ego.velocity * ctx.policy.ttc_stop * u(rng);
    scene.pedestrians = {
        Walker(0, scene.EgoFront() + gap, scene.road.EgoLaneCenter(), 0.0)};
    const Decision d = controller.Step(scene);
    ASSERT_EQ(d.command.fsm_state, FsmState::kEmergency);
    const double a_max = scene.road.MaxDeceleration();
    const double ramp = a_max / scene.vehicle.t_ramp_min * ctx.dt;
    EXPECT_NEAR(d.command.accel_out,
                std::max(-a_max, scene.ego.acceleration - ramp), 1e-12);
  }
}

TEST(Controller, LostPedestrianIsRememberedForTrackMemory) {
  ControllerContext ctx;
  ProposedController controller(ctx);
  Perception seen = Scene(10.0, 8.0);
  seen.pedestrians = {Walker(0, 45.0, -1.0, 1.2)};
  ASSERT_EQ(controller.Step(seen).command.fsm_state, FsmState::kYielding);
  const Perception blind = Scene(10.0, 8.0);
  const int ticks = static_cast<int>(ctx.policy.track_memory / ctx.dt);
  for (int k = 0; k < ticks - 1; ++k) {
    EXPECT_EQ(controller.Step(blind).command.fsm_state, FsmState::kYielding)
        << "tick " << k;
  }
  for (int k = 0; k < 3; ++k) controller.Step(blind);
  EXPECT_FALSE(controller.Step(blind).yield_target.has_value());
}

// FSM labeling.

TEST(Fsm, EveryEdgeHasItsEvent) {
  const PolicyThresholds policy;
  TransitionEvidence target{true, 5.0, std::nullopt};
  TransitionEvidence urgent{true, 0.5, std::nullopt};
  ScanResult steady;
  steady.state = FsmState::kSteadyDrive;
  steady.deciding_zone = RiskZone::kDanger;
  steady.danger_max = 0.9;
  ScanResult cautious;
  cautious.state = FsmState::kCautiousDrive;
  cautious.deciding_zone = RiskZone::kDanger;
  cautious.danger_max = 0.4;
  ScanResult normal;
  const TransitionEvidence to_steady{false, kInf, steady};
  const TransitionEvidence to_cautious{false, kInf, cautious};
  const TransitionEvidence to_normal{false, kInf, normal};

  using S = FsmState;
  using E = FsmEvent;
  EXPECT_EQ(LabelTransition(S::kNormalDrive, S::kSteadyDrive, to_steady, policy),
            E::kE1);
  EXPECT_EQ(
      LabelTransition(S::kCautiousDrive, S::kSteadyDrive, to_steady, policy),
      E::kE1);
  EXPECT_EQ(LabelTransition(S::kSteadyDrive, S::kNormalDrive, to_normal, policy),
            E::kE2);
  EXPECT_EQ(
      LabelTransition(S::kSteadyDrive, S::kCautiousDrive, to_cautious, policy),
      E::kE2);
  EXPECT_EQ(
      LabelTransition(S::kNormalDrive, S::kCautiousDrive, to_cautious, policy),
      E::kE3);
  EXPECT_EQ(
      LabelTransition(S::kCautiousDrive, S::kNormalDrive, to_normal, policy),
      E::kE4);
  for (S drive : {S::kNormalDrive, S::kSteadyDrive, S::kCautiousDrive}) {
    EXPECT_EQ(LabelTransition(drive, S::kYielding, target, policy), E::kE5);
    EXPECT_EQ(LabelTransition(drive, S::kEmergency, urgent, policy), E::kE8);
  }
  EXPECT_EQ(LabelTransition(S::kYielding, S::kSteadyDrive, to_steady, policy),
            E::kE6);
  EXPECT_EQ(LabelTransition(S::kEmergency, S::kNormalDrive, to_normal, policy),
            E::kE6);
  EXPECT_EQ(LabelTransition(S::kYielding, S::kEmergency, urgent, policy),
            E::kE8);
  EXPECT_EQ(LabelTransition(S::kEmergency, S::kYielding, target, policy),
            E::kE7);
  EXPECT_EQ(FsmEdges().size(), 20u);
}

TEST(Fsm, GuardsRejectInconsistentEvidence) {
  const PolicyThresholds policy;
  const TransitionEvidence none{false, kInf, std::nullopt};
  const TransitionEvidence target{true, 5.0, std::nullopt};
  EXPECT_FALSE(LabelTransition(FsmState::kNormalDrive, FsmState::kYielding,
                               none, policy));
  EXPECT_FALSE(LabelTransition(FsmState::kNormalDrive, FsmState::kEmergency,
                               target, policy));
  EXPECT_FALSE(LabelTransition(FsmState::kNormalDrive, FsmState::kSteadyDrive,
                               target, policy));
  // Not an edge at all.
  EXPECT_FALSE(LabelTransition(FsmState::kYielding, FsmState::kYielding,
                               target, policy));
}

TEST(Fsm, NamesRoundTrip) {
  for (FsmState s : {FsmState::kNormalDrive, FsmState::kSteadyDrive,
                     FsmState::kCautiousDrive, FsmState::kYielding,
                     FsmState::kEmergency}) {
    EXPECT_EQ(ParseFsmState(ToString(s)), s);
  }
  EXPECT_EQ(ToString(FsmEvent::kE4), "e4");
  EXPECT_THROW(ParseFsmState("Parked"), ConfigError);
}

TEST(PolicyThresholds, ValidationCatchesInvertedValues) {
  PolicyThresholds p;
  EXPECT_NO_THROW(p.Validate());
  p.danger.l_cautious = 0.6;
  EXPECT_THROW(p.Validate(), ConfigError);
  p = PolicyThresholds{};
  p.alpha1 = 0.9;
  EXPECT_THROW(p.Validate(), ConfigError);
  p = PolicyThresholds{};
  p.ttc_emergency = 2.0;
  EXPECT_THROW(p.Validate(), ConfigError);
}

}  // namespace
}  // namespace occrisk
