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

#include "occrisk/visibility.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occrisk {
namespace {

constexpr double kAngleTolerance = 1e-12;

// Angles where the circle |q - center| = radius crosses the segment.
void CircleCrossingAngles(Vec2 center, double radius, const Segment& s,
                          std::vector<double>& out) {
  const Vec2 d = s.b - s.a;
  const Vec2 f = s.a - center;
  const double a = Dot(d, d);
  const double b = 2.0 * Dot(f, d);
  const double c = Dot(f, f) - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (a <= 0.0 || disc < 0.0) return;
  const double root = std::sqrt(disc);
  for (double t : {(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)}) {
    if (t < 0.0 || t > 1.0) continue;
    const Vec2 q = s.a + t * d;
    out.push_back(std::atan2(q.y - center.y, q.x - center.x));
  }
}

// Distance from `origin` along `angle` to the infinite line through `s`.
double LineDistance(Vec2 origin, double angle, const Segment& s) {
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  const Vec2 edge = s.b - s.a;
  const double denom = Cross(dir, edge);
  if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::infinity();
  return Cross(s.a - origin, edge) / denom;
}

}  // namespace

void SensorSpec::Validate() const {
  if (!(r_visible > 0.0)) throw ConfigError("sensor r_visible must be > 0");
  if (!(fov_half_angle > 0.0 && fov_half_angle <= std::numbers::pi)) {
    throw ConfigError("sensor fov_half_angle must lie in (0, pi]");
  }
  if (!(polygon_arc_step > 0.0)) {
    throw ConfigError("sensor polygon_arc_step must be > 0");
  }
  if (!(sidewalk_resolution > 0.0)) {
    throw ConfigError("sensor sidewalk_resolution must be > 0");
  }
  if (pedestrians_occlude && !(pedestrian_occluder_size > 0.0)) {
    throw ConfigError("pedestrian_occluder_size must be > 0");
  }
}

VisibilityRegion::VisibilityRegion(Vec2 sensor, double r_visible,
                                   double fov_half_angle,
                                   std::span<const Rect> occluders)
    : sensor_(sensor),
      r_visible_(r_visible),
      fov_half_angle_(std::min(fov_half_angle, std::numbers::pi)) {
  std::vector<Segment> edges;
  for (const Rect& rect : occluders) {
    const Vec2 c = rect.Center();
    const double half_diag = 0.5 * std::hypot(rect.max_x - rect.min_x,
                                              rect.max_y - rect.min_y);
    if ((c - sensor_).Norm() - half_diag > r_visible_) continue;
    for (const Segment& e : rect.Edges()) edges.push_back(e);
  }

  const double lo = -fov_half_angle_;
  const double hi = fov_half_angle_;
  std::vector<double> critical{lo, hi};
  for (const Segment& e : edges) {
    const Vec2 rel = e.a - sensor_;
    if (rel.Norm() <= r_visible_) critical.push_back(std::atan2(rel.y, rel.x));
    CircleCrossingAngles(sensor_, r_visible_, e, critical);
  }
  std::erase_if(critical, [&](double a) { return a < lo || a > hi; });
  std::sort(critical.begin(), critical.end());
  for (double a : critical) {
    if (angles_.empty() || a - angles_.back() > kAngleTolerance) {
      angles_.push_back(a);
    }
  }

  edge_.resize(angles_.size() - 1);
  for (std::size_t k = 0; k + 1 < angles_.size(); ++k) {
    const double mid = 0.5 * (angles_[k] + angles_[k + 1]);
    double best = r_visible_;
    for (const Segment& e : edges) {
      const auto t = RaySegmentDistance(sensor_, mid, e);
      if (t && *t < best) {
        best = *t;
        edge_[k] = e;
      }
    }
  }
}

double VisibilityRegion::BoundaryDistance(std::size_t sector,
                                          double angle) const {
  if (!edge_[sector]) return r_visible_;
  return std::min(r_visible_, LineDistance(sensor_, angle, *edge_[sector]));
}

bool VisibilityRegion::Contains(Vec2 p) const {
  const Vec2 rel = p - sensor_;
  const double dist = rel.Norm();
  if (dist <= kGeomEpsilon) return true;
  if (dist > r_visible_ + kGeomEpsilon) return false;
  const double angle = std::atan2(rel.y, rel.x);
  if (angle < angles_.front() - kAngleTolerance ||
      angle > angles_.back() + kAngleTolerance) {
    return false;
  }
  if (edge_.empty()) return false;
  // Sectors whose closure contains `angle`; two of them at a boundary.
  auto it = std::upper_bound(angles_.begin(), angles_.end(), angle);
  std::size_t upper = static_cast<std::size_t>(it - angles_.begin());
  std::size_t first = upper == 0 ? 0 : upper - 1;
  first = std::min(first, edge_.size() - 1);
  double boundary = BoundaryDistance(first, angle);
  if (first > 0 && angle - angles_[first] <= kAngleTolerance) {
    boundary = std::max(boundary, BoundaryDistance(first - 1, angle));
  }
  if (first + 1 < edge_.size() &&
      angles_[first + 1] - angle <= kAngleTolerance) {
    boundary = std::max(boundary, BoundaryDistance(first + 1, angle));
  }
  return dist <= boundary + kGeomEpsilon;
}

std::vector<Vec2> VisibilityRegion::Polygon(double arc_step) const {
  std::vector<Vec2> out;
  const bool full_turn = fov_half_angle_ >= std::numbers::pi;
  if (!full_turn) out.push_back(sensor_);
  auto at = [this](double angle, double dist) {
    return Vec2{sensor_.x + dist * std::cos(angle),
                sensor_.y + dist * std::sin(angle)};
  };
  auto push = [&out](Vec2 p) {
    if (out.empty() || (p - out.back()).Norm() > 1e-12) out.push_back(p);
  };
  for (std::size_t k = 0; k < edge_.size(); ++k) {
    const double a0 = angles_[k];
    const double a1 = angles_[k + 1];
    push(at(a0, BoundaryDistance(k, a0)));
    if (!edge_[k]) {
      const int pieces = std::max(1, static_cast<int>(std::ceil(
                                         (a1 - a0) / arc_step)));
      const double step = (a1 - a0) / pieces;
      const double radius = r_visible_ / std::cos(0.5 * step);
      for (int i = 0; i < pieces; ++i) {
        push(at(a0 + (i + 0.5) * step, radius));
      }
    }
    push(at(a1, BoundaryDistance(k, a1)));
  }
  if (full_turn && out.size() > 1 && (out.front() - out.back()).Norm() < 1e-9) {
    out.pop_back();
  }
  return out;
}

Vec2 SensorPosition(const WorldState& world, const SensorSpec& sensor) {
  return {world.ego.longitudinal_position + sensor.mount_point.x,
          world.road.EgoLaneCenter() + sensor.mount_point.y};
}

std::vector<Rect> Occluders(const WorldState& world, const SensorSpec& sensor,
                            std::optional<int> exclude_pedestrian) {
  std::vector<Rect> out;
  out.reserve(world.parked_cars.size());
  for (const ParkedCar& car : world.parked_cars) {
    out.push_back(car.Footprint(world.road));
  }
  if (sensor.pedestrians_occlude) {
    const double h = 0.5 * sensor.pedestrian_occluder_size;
    for (const Pedestrian& p : world.pedestrians) {
      if (p.state != PedestrianState::kCrossing) continue;
      if (exclude_pedestrian && p.id == *exclude_pedestrian) continue;
      out.push_back(Rect{p.position.x - h, p.position.y - h, p.position.x + h,
                         p.position.y + h});
    }
  }
  return out;
}

VisibilityResult ComputeVisibility(const WorldState& world,
                                   const SensorSpec& sensor) {
  VisibilityResult result;
  result.sensor = SensorPosition(world, sensor);
  const std::vector<Rect> occluders = Occluders(world, sensor);
  const VisibilityRegion region(result.sensor, sensor.r_visible,
                                sensor.fov_half_angle, occluders);
  result.polygon = region.Polygon(sensor.polygon_arc_step);

  for (const Pedestrian& p : world.pedestrians) {
    bool visible = false;
    if (sensor.pedestrians_occlude && p.state == PedestrianState::kCrossing) {
      const std::vector<Rect> others = Occluders(world, sensor, p.id);
      visible = VisibilityRegion(result.sensor, sensor.r_visible,
                                 sensor.fov_half_angle, others)
                    .Contains(p.position);
    } else {
      visible = region.Contains(p.position);
    }
    if (visible) result.visible_pedestrian_ids.push_back(p.id);
  }
  std::sort(result.visible_pedestrian_ids.begin(),
            result.visible_pedestrian_ids.end());
  for (std::size_t i = 0; i < world.parked_cars.size(); ++i) {
    if (region.Contains(world.parked_cars[i].ReferencePoint(world.road))) {
      result.visible_parked_car_indices.push_back(static_cast<int>(i));
    }
  }
  result.crosswalk_visible = region.Contains(
      {world.road.crosswalk_position, world.road.EgoLaneCenter()});

  for (Side side : {Side::kRight, Side::kLeft}) {
    const double y = world.road.SidewalkCenter(side);
    const int samples = static_cast<int>(
        std::floor(world.road.length / sensor.sidewalk_resolution + 1e-9));
    bool in_run = false;
    double run_start = 0.0;
    double last = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double x = i * sensor.sidewalk_resolution;
      const bool occluded = !region.Contains({x, y});
      if (occluded) {
        if (!in_run) run_start = x;
        in_run = true;
        last = x;
      } else if (in_run) {
        result.occluded_sidewalk_intervals.push_back({side, run_start, last});
        in_run = false;
      }
    }
    if (in_run) {
      result.occluded_sidewalk_intervals.push_back({side, run_start, last});
    }
  }
  return result;
}

}  // namespace occrisk
