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
#include <random>

#include <gtest/gtest.h>

#include "test_oracles.h"

namespace occrisk {
namespace {

// Distance from p to segment ab.
double SegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = Dot(d, d);
  const double t =
      len2 > 0.0 ? std::clamp(Dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).Norm();
}

// Even-odd rule; points within `tol` of an edge count as inside.
bool InsidePolygon(const std::vector<Vec2>& poly, Vec2 p, double tol = 1e-7) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[j], b = poly[i];
    if (SegmentDistance(p, a, b) <= tol) return true;
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)) {
      inside = !inside;
    }
  }
  return inside;
}

WorldState OpenWorld() {
  WorldState w;
  w.ego.longitudinal_position = 10.0;
  return w;
}

TEST(Visibility, NoOccludersSeesEverythingInRangeAndFov) {
  WorldState w = OpenWorld();
  const SensorSpec sensor;
  const Vec2 s = SensorPosition(w, sensor);
  Pedestrian near;
  near.id = 0;
  near.position = {s.x + 20.0, -1.25};
  Pedestrian far = near;
  far.id = 1;
  far.position = {s.x + 45.0, -1.25};
  Pedestrian behind = near;
  behind.id = 2;
  behind.position = {s.x - 5.0, -1.25};
  w.pedestrians = {near, far, behind};
  const VisibilityResult r = ComputeVisibility(w, sensor);
  EXPECT_EQ(r.visible_pedestrian_ids, std::vector<int>{0});
  EXPECT_TRUE(r.occluded_sidewalk_intervals.size() >= 2u);
  // Polygon is the wedge: every vertex sits at the apex or on/outside the arc.
  ASSERT_FALSE(r.polygon.empty());
  EXPECT_EQ(r.polygon.front(), s);
  for (std::size_t i = 1; i < r.polygon.size(); ++i) {
    EXPECT_GE((r.polygon[i] - s).Norm(), sensor.r_visible - 1e-9);
  }
}

TEST(Visibility, ParkedCarBlocksPedestrianBehindIt) {
  WorldState w = OpenWorld();
  ParkedCar car;
  car.longitudinal_position = 25.0;
  w.parked_cars.push_back(car);
  Pedestrian p;
  p.position = {35.0, -1.25};
  w.pedestrians.push_back(p);
  const VisibilityResult r = ComputeVisibility(w, SensorSpec{});
  EXPECT_TRUE(r.visible_pedestrian_ids.empty());
  EXPECT_TRUE(testing::RayCastVisibleSets(w, SensorSpec{}).pedestrians.empty());
  EXPECT_EQ(r.visible_parked_car_indices, std::vector<int>{0});
}

TEST(Visibility, CrossingPedestriansOccludeOnlyWhenEnabled) {
  WorldState w = OpenWorld();
  const double y = w.road.EgoLaneCenter();
  Pedestrian front;
  front.id = 0;
  front.state = PedestrianState::kCrossing;
  front.position = {20.0, y};
  Pedestrian back = front;
  back.id = 1;
  back.position = {30.0, y};
  w.pedestrians = {front, back};
  SensorSpec sensor;
  EXPECT_EQ(ComputeVisibility(w, sensor).visible_pedestrian_ids.size(), 2u);
  sensor.pedestrians_occlude = true;
  EXPECT_EQ(ComputeVisibility(w, sensor).visible_pedestrian_ids,
            std::vector<int>{0});
}

TEST(Visibility, RayGrazingCornerCountsAsVisible) {
  WorldState w = OpenWorld();
  ParkedCar car;
  car.longitudinal_position = 20.0;
  w.parked_cars.push_back(car);
  const SensorSpec sensor;
  const Vec2 s = SensorPosition(w, sensor);
  const Rect fp = car.Footprint(w.road);
  // Extend the ray through the road-facing far corner onto the sidewalk.
  const Vec2 corner{fp.max_x, fp.max_y};
  const Vec2 dir = corner - s;
  const double t = (-1.0 - s.y) / dir.y;
  Pedestrian p;
  p.position = s + t * dir;
  w.pedestrians.push_back(p);
  EXPECT_EQ(ComputeVisibility(w, sensor).visible_pedestrian_ids,
            std::vector<int>{0});
}

TEST(Visibility, MatchesRayCastOracleOnRandomWorlds) {
  std::mt19937_64 rng(2024);
  const SensorSpec sensor;
  for (int i = 0; i < 300; ++i) {
    const WorldState w = testing::RandomSmallWorld(rng);
    const VisibilityResult r = ComputeVisibility(w, sensor);
    const auto oracle = testing::RayCastVisibleSets(w, sensor);
    EXPECT_EQ(r.visible_pedestrian_ids, oracle.pedestrians) << "world " << i;
    EXPECT_EQ(r.visible_parked_car_indices, oracle.parked_cars)
        << "world " << i;
    EXPECT_EQ(r.crosswalk_visible, oracle.crosswalk) << "world " << i;
  }
}

TEST(Visibility, LargerRangeNeverHidesAnything) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> range(5.0, 60.0);
  for (int i = 0; i < 200; ++i) {
    const WorldState w = testing::RandomSmallWorld(rng);
    SensorSpec small;
    small.r_visible = range(rng);
    SensorSpec large = small;
    large.r_visible += range(rng);
    const VisibilityResult a = ComputeVisibility(w, small);
    const VisibilityResult b = ComputeVisibility(w, large);
    EXPECT_TRUE(std::includes(b.visible_pedestrian_ids.begin(),
                              b.visible_pedestrian_ids.end(),
                              a.visible_pedestrian_ids.begin(),
                              a.visible_pedestrian_ids.end()));
    EXPECT_TRUE(std::includes(b.visible_parked_car_indices.begin(),
                              b.visible_parked_car_indices.end(),
                              a.visible_parked_car_indices.begin(),
                              a.visible_parked_car_indices.end()));
  }
}

TEST(Visibility, VisibleObjectsLieInsidePolygon) {
  std::mt19937_64 rng(11);
  const SensorSpec sensor;
  for (int i = 0; i < 200; ++i) {
    const WorldState w = testing::RandomSmallWorld(rng);
    const VisibilityResult r = ComputeVisibility(w, sensor);
    for (const Pedestrian& p : w.pedestrians) {
      const bool visible =
          std::binary_search(r.visible_pedestrian_ids.begin(),
                             r.visible_pedestrian_ids.end(), p.id);
      if (visible) EXPECT_TRUE(InsidePolygon(r.polygon, p.position));
      if (!InsidePolygon(r.polygon, p.position)) EXPECT_FALSE(visible);
    }
  }
}

TEST(Visibility, PolygonIsStarShapedAboutSensor) {
  std::mt19937_64 rng(12);
  const SensorSpec sensor;
  for (int i = 0; i < 100; ++i) {
    const WorldState w = testing::RandomSmallWorld(rng);
    const VisibilityResult r = ComputeVisibility(w, sensor);
    ASSERT_GE(r.polygon.size(), 3u);
    // Vertex angles about the sensor are non-decreasing after the apex.
    double last = -10.0;
    for (std::size_t k = 1; k < r.polygon.size(); ++k) {
      const Vec2 rel = r.polygon[k] - r.sensor;
      const double a = std::atan2(rel.y, rel.x);
      EXPECT_GE(a, last - 1e-9);
      last = a;
    }
  }
}

TEST(Visibility, OccludedIntervalsAreSortedDisjointAndHidden) {
  std::mt19937_64 rng(13);
  const SensorSpec sensor;
  for (int i = 0; i < 40; ++i) {
    const WorldState w = testing::RandomSmallWorld(rng);
    const VisibilityResult r = ComputeVisibility(w, sensor);
    std::vector<Rect> occluders;
    for (const ParkedCar& car : w.parked_cars) {
      occluders.push_back(car.Footprint(w.road));
    }
    for (Side side : {Side::kRight, Side::kLeft}) {
      double prev_end = -1.0;
      const double y = w.road.SidewalkCenter(side);
      for (const OccludedInterval& iv : r.occluded_sidewalk_intervals) {
        if (iv.side != side) continue;
        EXPECT_LE(iv.start, iv.end);
        EXPECT_GT(iv.start, prev_end);
        prev_end = iv.end;
        for (double x = iv.start; x <= iv.end + 1e-9;
             x += sensor.sidewalk_resolution) {
          EXPECT_FALSE(testing::RayCastVisible(r.sensor, sensor.r_visible,
                                               sensor.fov_half_angle,
                                               occluders, {x, y}))
              << "world " << i << " x " << x;
        }
      }
    }
  }
}

TEST(SensorSpec, RejectsBadValues) {
  SensorSpec s;
  s.r_visible = 0.0;
  EXPECT_THROW(s.Validate(), ConfigError);
  s = SensorSpec{};
  s.fov_half_angle = 4.0;
  EXPECT_THROW(s.Validate(), ConfigError);
}

}  // namespace
}  // namespace occrisk
