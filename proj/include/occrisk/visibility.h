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

#ifndef OCCRISK_VISIBILITY_H_
#define OCCRISK_VISIBILITY_H_

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "occrisk/geometry.h"
#include "occrisk/world.h"

namespace occrisk {

struct SensorSpec {
  double r_visible = 40.0;
  double fov_half_angle = 1.4;
  /// Offset from the ego footprint center, ego frame (x forward, y left).
  Vec2 mount_point{2.25, 0.0};
  /// When set, crossing pedestrians occlude as squares of this side length.
  bool pedestrians_occlude = false;
  double pedestrian_occluder_size = 0.5;
  /// Angular step for sampling the range arc in the exported polygon.
  double polygon_arc_step = 2.0 * std::numbers::pi / 180.0;
  /// Sampling step along each sidewalk for occluded intervals.
  double sidewalk_resolution = 0.1;

  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;

  void Validate() const;
};

struct OccludedInterval {
  Side side = Side::kRight;
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const OccludedInterval&,
                         const OccludedInterval&) = default;
};

/// Star-shaped region seen from a sensor pointing along +x: the range disc,
/// cut to the field-of-view wedge, minus everything behind an occluder.
/// The region is stored as angular sectors between critical angles (FOV
/// bounds, occluder corners, occluder/range-circle crossings); within one
/// sector the boundary is a single occluder edge or the range arc.
class VisibilityRegion {
 public:
  VisibilityRegion(Vec2 sensor, double r_visible, double fov_half_angle,
                   std::span<const Rect> occluders);

  /// True iff `p` is inside the region. Rays grazing an occluder corner or
  /// edge count as unobstructed.
  bool Contains(Vec2 p) const;

  /// Boundary vertices in angular order (apex first when the FOV is narrower
  /// than a full turn). Arc pieces are circumscribed, so the polygon covers
  /// the region.
  std::vector<Vec2> Polygon(double arc_step) const;

  Vec2 sensor() const { return sensor_; }
  double r_visible() const { return r_visible_; }

 private:
  double BoundaryDistance(std::size_t sector, double angle) const;

  Vec2 sensor_;
  double r_visible_;
  double fov_half_angle_;
  std::vector<double> angles_;               // sector boundaries, ascending
  std::vector<std::optional<Segment>> edge_;  // per sector, nullopt = arc
};

struct VisibilityResult {
  Vec2 sensor;
  std::vector<Vec2> polygon;
  std::vector<int> visible_pedestrian_ids;       // ascending
  std::vector<int> visible_parked_car_indices;   // ascending
  bool crosswalk_visible = false;
  std::vector<OccludedInterval> occluded_sidewalk_intervals;
};

/// Sensor position in world coordinates for the current ego pose.
Vec2 SensorPosition(const WorldState& world, const SensorSpec& sensor);

/// Rectangles that block sight for this world: the parked cars, plus
/// crossing pedestrians when `sensor.pedestrians_occlude` is set.
std::vector<Rect> Occluders(const WorldState& world, const SensorSpec& sensor,
                            std::optional<int> exclude_pedestrian = {});

VisibilityResult ComputeVisibility(const WorldState& world,
                                   const SensorSpec& sensor);

}  // namespace occrisk

#endif  // OCCRISK_VISIBILITY_H_
