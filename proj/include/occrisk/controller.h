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

#ifndef OCCRISK_CONTROLLER_H_
#define OCCRISK_CONTROLLER_H_

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "occrisk/estimator.h"
#include "occrisk/lqr.h"
#include "occrisk/perception.h"
#include "occrisk/risk_zones.h"
#include "occrisk/visibility.h"

namespace occrisk {

enum class FsmState {
  kNormalDrive,
  kSteadyDrive,
  kCautiousDrive,
  kYielding,
  kEmergency,
};

enum class RiskZone { kDanger, kDiscomfort };

/// Transition events of the driving FSM.
///   e1 risk > l_steady          e2 risk <= l_steady
///   e3 risk > l_cautious        e4 risk <= l_cautious
///   e5 a pedestrian to yield    e6 no pedestrian to yield
///   e7 TTC >= TTC_stop          e8 TTC < TTC_stop
enum class FsmEvent { kE1, kE2, kE3, kE4, kE5, kE6, kE7, kE8 };

std::string_view ToString(FsmState state);
std::string_view ToString(RiskZone zone);
std::string_view ToString(FsmEvent event);
FsmState ParseFsmState(std::string_view text);

bool IsDriveState(FsmState state);

/// Threshold and limit set applied while the given zone decides the state.
struct ZonePolicy {
  double l_cautious = 0.3;
  double l_steady = 0.5;
  double a_limit = 3.0;
  double j_limit = 0.9;

  friend bool operator==(const ZonePolicy&, const ZonePolicy&) = default;
};

struct PolicyThresholds {
  ZonePolicy danger{0.3, 0.5, 3.0, 0.9};
  ZonePolicy discomfort{0.5, 0.7, 2.0, 0.9};
  /// Limits while no zone flags any risk.
  double normal_a_limit = 2.0;
  double normal_j_limit = 0.9;
  /// Speed-limit fractions for SteadyDrive (highest risk) and CautiousDrive.
  double alpha1 = 0.25;
  double alpha2 = 2.0 / 3.0;
  double ttc_stop = 1.5;
  double ttc_emergency = 1.0;
  /// Spatial resolution of the look-ahead risk scan.
  double delta_d = 1.0;
  /// Yielding stops this far before the pedestrian's crossing line.
  double yield_standoff = 3.0;
  /// Deceleration bound while yielding; capped at a_max at run time.
  double yield_a_limit = 10.0;
  /// Pedestrian path prediction margins.
  double path_lateral_margin = 0.5;
  double path_time_margin = 1.0;
  /// A pedestrian that drops out of view keeps being predicted at its last
  /// lateral velocity for this long (seconds) by the yield logic.
  double track_memory = 2.0;

  friend bool operator==(const PolicyThresholds&,
                         const PolicyThresholds&) = default;

  const ZonePolicy& Zone(RiskZone zone) const {
    return zone == RiskZone::kDanger ? danger : discomfort;
  }
  void Validate() const;
};

struct ControlCommand {
  FsmState fsm_state = FsmState::kNormalDrive;
  double v_ref = 0.0;
  double a_limit = 0.0;
  double j_limit = 0.0;
  double accel_out = 0.0;
};

/// Everything a controller instance needs besides the per-tick perception.
struct ControllerContext {
  EstimatorParams estimator;
  PolicyThresholds policy;
  BrakingProfile comfort{2.0, 0.9};
  GainSet gains;
  double dt = 0.1;
};

/// Longitudinal time until the ego front reaches `pedestrian_x`; infinity
/// when the ego is stopped or already past.
double TimeToCollision(const Perception& scene, double pedestrian_x);
double TimeToCollision(const WorldState& world, const Pedestrian& pedestrian);

/// True when the pedestrian's lateral walk, at constant speed, keeps it in
/// the ego lane band (footprint plus margin) at some time the ego could
/// occupy the pedestrian's longitudinal position: arriving no sooner than at
/// max(v, speed limit) and leaving no later than at the current speed. The
/// fast arrival bound keeps the verdict from flipping as the ego slows.
bool IsInPath(const Perception& scene, const SeenPedestrian& pedestrian,
              const PolicyThresholds& policy);

struct YieldTarget {
  int pedestrian_id = 0;
  /// Ego front to the pedestrian's crossing line.
  double gap = 0.0;
  double ttc = 0.0;
};

/// Closest in-path visible pedestrian (lowest id on ties).
std::optional<YieldTarget> FindYieldTarget(const Perception& scene,
                                           const PolicyThresholds& policy);

/// Physical braking profile: a_max = mu * g reached over t_ramp_min.
BrakingProfile PhysicalBraking(const Road& road, const VehicleSpec& vehicle);

struct ScanResult {
  double danger_max = 0.0;
  double discomfort_max = 0.0;
  bool reached_discomfort = false;
  FsmState state = FsmState::kNormalDrive;
  /// Zone whose threshold comparison set `state`; empty for NormalDrive.
  std::optional<RiskZone> deciding_zone;
  int points = 0;
};

struct ScanPoint {
  double distance = 0.0;
  RiskZone zone = RiskZone::kDanger;
  double risk = 0.0;
};

/// Walks the look-ahead from 0 to d_stop_comfort in steps of delta_d,
/// keeping a running maximum of the emergence probability per zone and
/// overwriting the state whenever a zone threshold is exceeded.
ScanResult ScanRisk(const Perception& scene, const RiskZones& zones,
                    const PolicyThresholds& policy,
                    const EstimatorParams& estimator,
                    std::vector<ScanPoint>* points = nullptr);

/// Reference handed to the tracking layer. `distance` is set while yielding.
struct TrackingReference {
  double v_ref = 0.0;
  std::optional<double> distance;
  double distance_ref = 0.0;
};

/// Jerk-limited LQR tracking. The normalized jerk -K(x - x_ref) is scaled
/// by j_yield or j_cruise, clamped to the command's j_limit and integrated
/// onto `previous_accel`; the result moves toward [-a_limit, a_limit] no
/// faster than j_limit. Emergency ramps to -a_limit at j_limit.
double Track(const ControlCommand& command, double velocity,
             double previous_accel, const TrackingReference& reference,
             const GainSet& gains, double dt);

/// Inputs that justify one FSM transition; logged per tick.
struct TransitionEvidence {
  bool has_yield_target = false;
  double ttc = 0.0;
  std::optional<ScanResult> scan;
};

struct FsmEdge {
  FsmState from;
  FsmState to;
  FsmEvent event;
};

/// The implemented edge set.
std::span<const FsmEdge> FsmEdges();

/// Event labeling the transition, or nullopt when no edge from `from` to
/// `to` has a guard satisfied by `evidence`.
std::optional<FsmEvent> LabelTransition(FsmState from, FsmState to,
                                        const TransitionEvidence& evidence,
                                        const PolicyThresholds& policy);

struct Decision {
  ControlCommand command;
  RiskZones zones;
  std::optional<YieldTarget> yield_target;
  std::optional<ScanResult> scan;
  TransitionEvidence evidence;
  /// Set when the state changed this tick.
  std::optional<FsmEvent> event;
};

/// Drive-state choice produced by a concrete policy when nobody is to be
/// yielded to.
struct DriveChoice {
  FsmState state = FsmState::kNormalDrive;
  double v_ref = 0.0;
  double a_limit = 0.0;
  double j_limit = 0.0;
  std::optional<ScanResult> scan;
};

/// Shared yield/emergency machinery plus tracking. Subclasses only decide
/// the drive state while no pedestrian needs yielding.
class LongitudinalController {
 public:
  explicit LongitudinalController(ControllerContext context);
  virtual ~LongitudinalController() = default;

  virtual std::string_view name() const = 0;

  Decision Step(const Perception& scene);

  FsmState state() const { return state_; }
  const ControllerContext& context() const { return context_; }

 protected:
  virtual DriveChoice ChooseDrive(const Perception& scene,
                                  const RiskZones& zones) = 0;

 private:
  struct TrackedPedestrian {
    SeenPedestrian last;
    double seen_at = 0.0;
  };

  /// Adds predictions of recently lost pedestrians to `scene`.
  Perception WithTracks(const Perception& scene);

  ControllerContext context_;
  FsmState state_ = FsmState::kNormalDrive;
  std::optional<double> last_accel_;
  double clock_ = 0.0;
  std::map<int, TrackedPedestrian> tracks_;
};

/// Occlusion-aware controller: emergence-probability scan over the risk
/// zones picks NormalDrive / SteadyDrive / CautiousDrive.
class ProposedController final : public LongitudinalController {
 public:
  using LongitudinalController::LongitudinalController;
  std::string_view name() const override { return "proposed"; }

 protected:
  DriveChoice ChooseDrive(const Perception& scene,
                          const RiskZones& zones) override;
};

}  // namespace occrisk

#endif  // OCCRISK_CONTROLLER_H_
