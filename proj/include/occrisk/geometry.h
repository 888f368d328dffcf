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

#ifndef OCCRISK_GEOMETRY_H_
#define OCCRISK_GEOMETRY_H_

#include <array>
#include <cmath>
#include <optional>

namespace occrisk {

/// Tolerance used by every geometric predicate, in meters.
inline constexpr double kGeomEpsilon = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double Norm() const { return std::hypot(x, y); }
};

inline double Cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Axis-aligned rectangle; min corner strictly below max corner.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  friend bool operator==(const Rect&, const Rect&) = default;

  bool Contains(Vec2 p, double eps = kGeomEpsilon) const {
    return p.x >= min_x - eps && p.x <= max_x + eps && p.y >= min_y - eps &&
           p.y <= max_y + eps;
  }
  double Area() const { return (max_x - min_x) * (max_y - min_y); }
  Vec2 Center() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }

  /// Corners in counter-clockwise order starting at (min_x, min_y).
  std::array<Vec2, 4> Corners() const;
  std::array<Segment, 4> Edges() const;
};

/// Distance along the ray origin + t * (cos(angle), sin(angle)) to the
/// segment, or nullopt when the ray misses it. Rays parallel to the segment
/// never report a hit.
std::optional<double> RaySegmentDistance(Vec2 origin, double angle,
                                         const Segment& segment);

/// Wraps an angle into (-pi, pi].
double WrapAngle(double angle);

}  // namespace occrisk

#endif  // OCCRISK_GEOMETRY_H_
