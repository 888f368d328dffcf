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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace occrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void Require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

void ValidateZone(const ZonePolicy& zone, const char* name) {
  const std::string prefix = std::string("policy ") + name + " zone: ";
  Require(zone.l_cautious >= 0.0 && zone.l_steady <= 1.0 &&
              zone.l_cautious < zone.l_steady,
          prefix + "need 0 <= l_cautious < l_steady <= 1");
  Require(zone.a_limit > 0.0, prefix + "a_limit must be > 0");
  Require(zone.j_limit > 0.0, prefix + "j_limit must be > 0");
}

constexpr std::array<FsmEdge, 20> kEdges{{
    {FsmState::kNormalDrive, FsmState::kSteadyDrive, FsmEvent::kE1},
    {FsmState::kCautiousDrive, FsmState::kSteadyDrive, FsmEvent::kE1},
    {FsmState::kSteadyDrive, FsmState::kNormalDrive, FsmEvent::kE2},
    {FsmState::kSteadyDrive, FsmState::kCautiousDrive, FsmEvent::kE2},
    {FsmState::kNormalDrive, FsmState::kCautiousDrive, FsmEvent::kE3},
    {FsmState::kCautiousDrive, FsmState::kNormalDrive, FsmEvent::kE4},
    {FsmState::kNormalDrive, FsmState::kYielding, FsmEvent::kE5},
    {FsmState::kSteadyDrive, FsmState::kYielding, FsmEvent::kE5},
    {FsmState::kCautiousDrive, FsmState::kYielding, FsmEvent::kE5},
    {FsmState::kYielding, FsmState::kNormalDrive, FsmEvent::kE6},
    {FsmState::kYielding, FsmState::kSteadyDrive, FsmEvent::kE6},
    {FsmState::kYielding, FsmState::kCautiousDrive, FsmEvent::kE6},
    {FsmState::kYielding, FsmState::kEmergency, FsmEvent::kE8},
    {FsmState::kEmergency, FsmState::kYielding, FsmEvent::kE7},
    {FsmState::kNormalDrive, FsmState::kEmergency, FsmEvent::kE8},
    {FsmState::kSteadyDrive, FsmState::kEmergency, FsmEvent::kE8},
    {FsmState::kCautiousDrive, FsmState::kEmergency, FsmEvent::kE8},
    {FsmState::kEmergency, FsmState::kNormalDrive, FsmEvent::kE6},
    {FsmState::kEmergency, FsmState::kSteadyDrive, FsmEvent::kE6},
    {FsmState::kEmergency, FsmState::kCautiousDrive, FsmEvent::kE6},
}};

// Drive state implied by the scan alone.
bool ScanImplies(const ScanResult& scan, FsmState state,
                 const PolicyThresholds& policy) {
  auto zone_max = [&scan](RiskZone zone) {
    return zone == RiskZone::kDanger ? scan.danger_max : scan.discomfort_max;
  };
  switch (state) {
    case FsmState::kSteadyDrive:
      return scan.deciding_zone &&
             zone_max(*scan.deciding_zone) >
                 policy.Zone(*scan.deciding_zone).l_steady;
    case FsmState::kCautiousDrive:
      return scan.deciding_zone &&
             zone_max(*scan.deciding_zone) >
                 policy.Zone(*scan.deciding_zone).l_cautious &&
             zone_max(*scan.deciding_zone) <=
                 policy.Zone(*scan.deciding_zone).l_steady;
    case FsmState::kNormalDrive:
      return !scan.deciding_zone && scan.danger_max <= policy.danger.l_cautious &&
             scan.discomfort_max <= policy.discomfort.l_cautious;
    default:
      return false;
  }
}

}  // namespace

std::string_view ToString(FsmState state) {
  switch (state) {
    case FsmState::kNormalDrive:
      return "NormalDrive";
    case FsmState::kSteadyDrive:
      return "SteadyDrive";
    case FsmState::kCautiousDrive:
      return "CautiousDrive";
    case FsmState::kYielding:
      return "Yielding";
    case FsmState::kEmergency:
      return "Emergency";
  }
  return "NormalDrive";
}

std::string_view ToString(RiskZone zone) {
  return zone == RiskZone::kDanger ? "danger" : "discomfort";
}

std::string_view ToString(FsmEvent event) {
  static constexpr std::array<std::string_view, 8> kNames{
      "e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8"};
  return kNames[static_cast<std::size_t>(event)];
}

FsmState ParseFsmState(std::string_view text) {
  for (FsmState s :
       {FsmState::kNormalDrive, FsmState::kSteadyDrive, FsmState::kCautiousDrive,
        FsmState::kYielding, FsmState::kEmergency}) {
    if (ToString(s) == text) return s;
  }
  throw ConfigError("unknown FSM state '" + std::string(text) + "'");
}

bool IsDriveState(FsmState state) {
  return state == FsmState::kNormalDrive || state == FsmState::kSteadyDrive ||
         state == FsmState::kCautiousDrive;
}

void PolicyThresholds::Validate() const {
  ValidateZone(danger, "danger");
  ValidateZone(discomfort, "discomfort");
  Require(normal_a_limit > 0.0 && normal_j_limit > 0.0,
          "policy normal limits must be > 0");
  Require(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 <= 1.0,
          "policy needs 0 < alpha1 < alpha2 <= 1 (SteadyDrive is the slower "
          "state)");
  Require(ttc_stop > 0.0 && ttc_emergency > 0.0 && ttc_emergency <= ttc_stop,
          "policy needs 0 < ttc_emergency <= ttc_stop");
  Require(delta_d > 0.0, "policy delta_d must be > 0");
  Require(yield_standoff >= 0.0, "policy yield_standoff must be >= 0");
  Require(yield_a_limit > 0.0, "policy yield_a_limit must be > 0");
  Require(path_lateral_margin >= 0.0 && path_time_margin >= 0.0,
          "policy path margins must be >= 0");
  Require(track_memory >= 0.0, "policy track_memory must be >= 0");
}

double TimeToCollision(const Perception& scene, double pedestrian_x) {
  if (pedestrian_x < scene.EgoRear()) return kInf;
  if (scene.ego.velocity <= 0.0) return kInf;
  return std::max(0.0, pedestrian_x - scene.EgoFront()) / scene.ego.velocity;
}

double TimeToCollision(const WorldState& world, const Pedestrian& pedestrian) {
  Perception scene;
  scene.road = world.road;
  scene.vehicle = world.vehicle;
  scene.ego = world.ego;
  return TimeToCollision(scene, pedestrian.position.x);
}

bool IsInPath(const Perception& scene, const SeenPedestrian& pedestrian,
              const PolicyThresholds& policy) {
  const double x = pedestrian.position.x;
  const double rear = scene.EgoRear();
  if (x < rear) return false;

  const double center = scene.road.EgoLaneCenter();
  const double half = 0.5 * scene.vehicle.width + policy.path_lateral_margin;
  const double lo = center - half;
  const double hi = center + half;
  const double y = pedestrian.position.y;
  const double vy = pedestrian.lateral_velocity;

  double t_enter = 0.0;
  double t_exit = kInf;
  if (y < lo || y > hi) {
    if (vy == 0.0) return false;
    const double near_edge = y < lo ? lo : hi;
    t_enter = (near_edge - y) / vy;
    if (t_enter < 0.0) return false;  // walking away from the lane
  }
  if (vy != 0.0) {
    const double far_edge = vy > 0.0 ? hi : lo;
    t_exit = (far_edge - y) / vy;
    if (t_exit < 0.0) return false;
  }

  // The ego clears the crossing line no earlier than at its current speed
  // and arrives no earlier than at the faster of that and the speed limit.
  const double gap_front = std::max(0.0, x - scene.EgoFront());
  const double v = scene.ego.velocity;
  const double v_fast = std::max(v, scene.road.speed_limit);
  const double t_arrive = gap_front / v_fast;
  const double t_clear = v > 0.0 ? (x - rear) / v : kInf;
  return t_enter - policy.path_time_margin <= t_clear &&
         t_arrive <= t_exit + policy.path_time_margin;
}

std::optional<YieldTarget> FindYieldTarget(const Perception& scene,
                                           const PolicyThresholds& policy) {
  std::optional<YieldTarget> best;
  for (const SeenPedestrian& p : scene.pedestrians) {
    if (!IsInPath(scene, p, policy)) continue;
    const double gap = p.position.x - scene.EgoFront();
    if (!best || gap < best->gap ||
        (gap == best->gap && p.id < best->pedestrian_id)) {
      best = YieldTarget{p.id, gap, TimeToCollision(scene, p.position.x)};
    }
  }
  return best;
}

BrakingProfile PhysicalBraking(const Road& road, const VehicleSpec& vehicle) {
  return {road.MaxDeceleration(), vehicle.t_ramp_min};
}

ScanResult ScanRisk(const Perception& scene, const RiskZones& zones,
                    const PolicyThresholds& policy,
                    const EstimatorParams& estimator,
                    std::vector<ScanPoint>* points) {
  ScanResult result;
  RiskZone zone = RiskZone::kDanger;
  double max_risk = 0.0;
  const double front = scene.EgoFront();
  double d = 0.0;
  do {
    if (zone == RiskZone::kDanger && d > zones.d_stop_min) {
      zone = RiskZone::kDiscomfort;
      result.reached_discomfort = true;
      max_risk = 0.0;
    }
    const double risk = EmergenceProbability(
        BuildObservation(scene, front + d, estimator), estimator.weights);
    if (points != nullptr) points->push_back({d, zone, risk});
    ++result.points;
    max_risk = std::max(max_risk, risk);
    (zone == RiskZone::kDanger ? result.danger_max : result.discomfort_max) =
        max_risk;
    const ZonePolicy& zp = policy.Zone(zone);
    if (max_risk > zp.l_steady) {
      result.state = FsmState::kSteadyDrive;
      result.deciding_zone = zone;
    } else if (max_risk > zp.l_cautious) {
      result.state = FsmState::kCautiousDrive;
      result.deciding_zone = zone;
    }
    d += policy.delta_d;
  } while (d < zones.d_stop_comfort);
  return result;
}

double Track(const ControlCommand& command, double velocity,
             double previous_accel, const TrackingReference& reference,
             const GainSet& gains, double dt) {
  const double step = command.j_limit * dt;
  double desired = 0.0;
  if (command.fsm_state == FsmState::kEmergency) {
    desired = -command.a_limit;
  } else {
    double jerk = 0.0;
    if (reference.distance) {
      const Eigen::Vector3d error{*reference.distance - reference.distance_ref,
                                  velocity, previous_accel};
      jerk = gains.j_yield * -gains.k_yield.dot(error);
    } else {
      const Eigen::Vector2d error{velocity - reference.v_ref, previous_accel};
      jerk = gains.j_cruise * -gains.k_cruise.dot(error);
    }
    jerk = std::clamp(jerk, -command.j_limit, command.j_limit);
    desired = std::clamp(previous_accel + dt * jerk, -command.a_limit,
                         command.a_limit);
  }
  return previous_accel + std::clamp(desired - previous_accel, -step, step);
}

std::span<const FsmEdge> FsmEdges() { return kEdges; }

std::optional<FsmEvent> LabelTransition(FsmState from, FsmState to,
                                        const TransitionEvidence& evidence,
                                        const PolicyThresholds& policy) {
  for (const FsmEdge& edge : kEdges) {
    if (edge.from != from || edge.to != to) continue;
    const bool target = evidence.has_yield_target;
    const bool urgent = target && evidence.ttc < policy.ttc_stop;
    bool guard = false;
    switch (edge.event) {
      case FsmEvent::kE1:
      case FsmEvent::kE2:
      case FsmEvent::kE3:
      case FsmEvent::kE4:
        guard = !target && evidence.scan &&
                ScanImplies(*evidence.scan, to, policy);
        break;
      case FsmEvent::kE5:
      case FsmEvent::kE7:
        guard = target && !urgent;
        break;
      case FsmEvent::kE6:
        guard = !target &&
                (!evidence.scan || ScanImplies(*evidence.scan, to, policy));
        break;
      case FsmEvent::kE8:
        guard = urgent;
        break;
    }
    if (guard) return edge.event;
  }
  return std::nullopt;
}

LongitudinalController::LongitudinalController(ControllerContext context)
    : context_(std::move(context)) {}

Perception LongitudinalController::WithTracks(const Perception& scene) {
  Perception out = scene;
  for (const SeenPedestrian& p : scene.pedestrians) {
    tracks_[p.id] = {p, clock_};
  }
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    const double age = clock_ - it->second.seen_at;
    if (age > context_.policy.track_memory) {
      it = tracks_.erase(it);
      continue;
    }
    if (age > 0.0) {
      SeenPedestrian predicted = it->second.last;
      predicted.position.y += age * predicted.lateral_velocity;
      out.pedestrians.push_back(predicted);
    }
    ++it;
  }
  return out;
}

Decision LongitudinalController::Step(const Perception& scene) {
  const PolicyThresholds& policy = context_.policy;
  const double a_prev = last_accel_.value_or(scene.ego.acceleration);
  const double a_max = scene.road.MaxDeceleration();
  const double v = scene.ego.velocity;

  Decision out;
  out.zones = ComputeRiskZones(v, context_.comfort,
                               PhysicalBraking(scene.road, scene.vehicle),
                               scene.r_visible);
  out.yield_target = FindYieldTarget(WithTracks(scene), policy);
  clock_ += context_.dt;

  ControlCommand& cmd = out.command;
  TrackingReference reference;
  if (out.yield_target) {
    if (out.yield_target->ttc < policy.ttc_stop) {
      cmd.fsm_state = FsmState::kEmergency;
      cmd.v_ref = 0.0;
      cmd.a_limit = a_max;
      cmd.j_limit = scene.vehicle.t_ramp_min > 0.0
                        ? a_max / scene.vehicle.t_ramp_min
                        : kInf;
    } else {
      cmd.fsm_state = FsmState::kYielding;
      cmd.v_ref = 0.0;
      cmd.a_limit = std::min(policy.yield_a_limit, a_max);
      cmd.j_limit = context_.gains.j_yield;
      reference.distance = out.yield_target->gap;
      reference.distance_ref = policy.yield_standoff;
    }
  } else {
    DriveChoice choice = ChooseDrive(scene, out.zones);
    cmd.fsm_state = choice.state;
    cmd.v_ref = choice.v_ref;
    cmd.a_limit = std::min(choice.a_limit, a_max);
    cmd.j_limit = choice.j_limit;
    reference.v_ref = choice.v_ref;
    out.scan = choice.scan;
  }

  double accel =
      Track(cmd, v, a_prev, reference, context_.gains, context_.dt);
  if (cmd.fsm_state == FsmState::kYielding) {
    // Never exceed the speed limit while closing in on a far stop line.
    ControlCommand cruise = cmd;
    cruise.fsm_state = FsmState::kNormalDrive;
    TrackingReference limit;
    limit.v_ref = scene.road.speed_limit;
    accel = std::min(accel, Track(cruise, v, a_prev, limit, context_.gains,
                                  context_.dt));
  }
  cmd.accel_out = accel;

  out.evidence.has_yield_target = out.yield_target.has_value();
  out.evidence.ttc = out.yield_target ? out.yield_target->ttc : kInf;
  out.evidence.scan = out.scan;
  if (cmd.fsm_state != state_) {
    out.event = LabelTransition(state_, cmd.fsm_state, out.evidence, policy);
  }
  state_ = cmd.fsm_state;
  last_accel_ = accel;
  return out;
}

DriveChoice ProposedController::ChooseDrive(const Perception& scene,
                                            const RiskZones& zones) {
  const ControllerContext& ctx = context();
  DriveChoice choice;
  choice.scan = ScanRisk(scene, zones, ctx.policy, ctx.estimator);
  choice.state = choice.scan->state;
  const double limit = scene.road.speed_limit;
  switch (choice.state) {
    case FsmState::kSteadyDrive:
      choice.v_ref = ctx.policy.alpha1 * limit;
      break;
    case FsmState::kCautiousDrive:
      choice.v_ref = ctx.policy.alpha2 * limit;
      break;
    default:
      choice.v_ref = limit;
      break;
  }
  if (choice.scan->deciding_zone) {
    const ZonePolicy& zp = ctx.policy.Zone(*choice.scan->deciding_zone);
    choice.a_limit = zp.a_limit;
    choice.j_limit = zp.j_limit;
  } else {
    choice.a_limit = ctx.policy.normal_a_limit;
    choice.j_limit = ctx.policy.normal_j_limit;
  }
  return choice;
}

}  // namespace occrisk
