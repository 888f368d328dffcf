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

#ifndef OCCRISK_WORLD_H_
#define OCCRISK_WORLD_H_

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "occrisk/geometry.h"

namespace occrisk {

inline constexpr double kGravity = 9.81;

/// Thrown for any invalid scenario, road, or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Side { kRight, kLeft };
enum class Family { kSc1, kSc2, kSc3 };
enum class PedestrianState { kWaiting, kCrossing, kCrossed, kHit };

std::string_view ToString(Side side);
std::string_view ToString(Family family);
std::string_view ToString(PedestrianState state);
Side ParseSide(std::string_view text);
Family ParseFamily(std::string_view text);
PedestrianState ParsePedestrianState(std::string_view text);

// Lateral layout, in meters from the right road edge (y = 0):
//   right sidewalk [-sidewalk_width, 0], road [0, Width()], left sidewalk
//   [Width(), Width() + sidewalk_width]. The two outermost lanes are parking
//   strips; the ego drives in the middle lane.
struct Road {
  double length = 96.0;
  int lane_count = 3;
  double lane_width = 3.0;
  double speed_limit = 30.0 / 3.6;
  double friction_mu = 0.8;
  double crosswalk_position = 60.0;
  double crosswalk_width = 4.0;
  double sidewalk_width = 2.5;

  friend bool operator==(const Road&, const Road&) = default;

  double Width() const { return lane_count * lane_width; }
  double EgoLaneCenter() const { return (lane_count / 2 + 0.5) * lane_width; }
  /// Physical deceleration bound a_max = mu * g.
  double MaxDeceleration() const { return friction_mu * kGravity; }
  /// Lateral coordinate of the middle of the sidewalk on `side`.
  double SidewalkCenter(Side side) const;
  void Validate() const;
};

struct VehicleSpec {
  double length = 4.5;
  double width = 1.8;
  /// Shortest physically possible brake ramp from 0 to a_max.
  double t_ramp_min = 0.3;

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

struct ParkedCar {
  double longitudinal_position = 0.0;  // rear edge
  double length = 4.5;
  double width = 1.8;
  Side side = Side::kRight;
  double lateral_offset = 0.3;  // from the road edge on `side`

  friend bool operator==(const ParkedCar&, const ParkedCar&) = default;

  Rect Footprint(const Road& road) const;
  /// Midpoint of the edge facing the travel lane. Used as the car's
  /// visibility reference point.
  Vec2 ReferencePoint(const Road& road) const;
};

struct Pedestrian {
  int id = 0;
  Vec2 position;
  double walking_speed = 1.5;
  bool will_cross = false;
  /// A crossing pedestrian starts walking once the gap between the ego front
  /// and its longitudinal position drops to this value.
  double trigger_distance = 0.0;
  PedestrianState state = PedestrianState::kWaiting;
  /// Sidewalk the pedestrian starts on; crossing moves toward the other one.
  Side start_side = Side::kRight;

  friend bool operator==(const Pedestrian&, const Pedestrian&) = default;

  /// +1 when walking toward increasing y, -1 otherwise.
  double CrossingDirection() const {
    return start_side == Side::kRight ? 1.0 : -1.0;
  }
  /// Lateral velocity while crossing, zero otherwise.
  double LateralVelocity() const {
    return state == PedestrianState::kCrossing
               ? CrossingDirection() * walking_speed
               : 0.0;
  }
};

struct EgoState {
  double longitudinal_position = 0.0;  // footprint center
  double velocity = 0.0;
  double acceleration = 0.0;
  double previous_jerk = 0.0;

  friend bool operator==(const EgoState&, const EgoState&) = default;
};

struct WorldState {
  Road road;
  VehicleSpec vehicle;
  std::vector<ParkedCar> parked_cars;
  std::vector<Pedestrian> pedestrians;
  EgoState ego;
  double time = 0.0;
  std::int64_t tick = 0;

  friend bool operator==(const WorldState&, const WorldState&) = default;

  Rect EgoFootprint() const;
  double EgoFront() const {
    return ego.longitudinal_position + 0.5 * vehicle.length;
  }
  double EgoRear() const {
    return ego.longitudinal_position - 0.5 * vehicle.length;
  }
  /// Checks every type invariant; throws ConfigError on the first violation.
  void Validate() const;
};

struct IntRange {
  int min = 0;
  int max = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct ScenarioConfig {
  Family family = Family::kSc1;
  std::uint64_t seed = 0;
  IntRange pedestrians{1, 2};
  IntRange parked_cars{1, 2};
  double non_crossing_fraction = 0.3;
  double tick = 0.1;

  Road road;
  VehicleSpec vehicle;
  double ego_initial_speed = 5.0;
  double parking_slot_length = 6.0;
  double parked_car_min_length = 4.2;
  double parked_car_max_length = 5.0;
  double parked_car_width = 1.8;
  double parked_car_lateral_offset = 0.3;
  /// Crosswalk center is drawn uniformly from this longitudinal band.
  double crosswalk_min_position = 35.0;
  double crosswalk_max_position = 80.0;

  double pedestrian_speed_mean = 1.5;
  double pedestrian_speed_std = 0.6;
  double trigger_min_distance = 5.0;
  double trigger_max_distance = 40.0;
  /// Placement mix for pedestrians: behind a parked car on their sidewalk,
  /// at the crosswalk, otherwise uniformly along the sidewalk.
  double behind_car_probability = 0.5;
  double crosswalk_probability = 0.25;
  /// Pedestrians are never placed before this longitudinal position.
  double pedestrian_min_position = 12.0;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) =
      default;

  void Validate() const;
};

/// Family defaults: sc1 1-2 pedestrians and 1-2 cars, sc2 several of each,
/// sc3 every parking slot filled.
ScenarioConfig DefaultScenarioConfig(Family family, std::uint64_t seed);

/// Longitudinal parking slots [start, start + slot_length) usable on either
/// side. Slots overlapping the crosswalk are excluded.
std::vector<double> ParkingSlotStarts(const Road& road, double slot_length);

WorldState GenerateScenario(const ScenarioConfig& config);

/// Advances the world by one tick. The ego acceleration is clamped to
/// [-a_max, a_max]; velocity never drops below zero.
WorldState StepWorld(const WorldState& world, double ego_accel_command,
                     double dt);

/// Lowest id of a pedestrian whose point lies inside the ego footprint.
std::optional<int> DetectCollision(const WorldState& world);

/// Samples a Gaussian walking speed, resampling non-positive draws.
template <typename Rng>
double SampleWalkingSpeed(Rng& rng, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  for (;;) {
    const double v = dist(rng);
    if (v > 0.0) return v;
  }
}

}  // namespace occrisk

#endif  // OCCRISK_WORLD_H_
