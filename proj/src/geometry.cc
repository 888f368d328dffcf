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

#include "occrisk/geometry.h"

#include <numbers>

namespace occrisk {

std::array<Vec2, 4> Rect::Corners() const {
  return {Vec2{min_x, min_y}, Vec2{max_x, min_y}, Vec2{max_x, max_y},
          Vec2{min_x, max_y}};
}

std::array<Segment, 4> Rect::Edges() const {
  const auto c = Corners();
  return {Segment{c[0], c[1]}, Segment{c[1], c[2]}, Segment{c[2], c[3]},
          Segment{c[3], c[0]}};
}

std::optional<double> RaySegmentDistance(Vec2 origin, double angle,
                                         const Segment& segment) {
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  const Vec2 edge = segment.b - segment.a;
  const double denom = Cross(dir, edge);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 offset = segment.a - origin;
  const double t = Cross(offset, edge) / denom;
  const double u = Cross(offset, dir) / denom;
  if (t < 0.0 || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
  return t;
}

double WrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  angle = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (angle <= 0.0) angle += kTwoPi;
  return angle - std::numbers::pi;
}

}  // namespace occrisk
