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

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library code it is meant to check.

#ifndef OCCRISK_TESTS_TEST_ORACLES_H_
#define OCCRISK_TESTS_TEST_ORACLES_H_

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "occrisk/controller.h"
#include "occrisk/visibility.h"
#include "occrisk/world.h"

namespace occrisk::testing {

/// Gain from backward Riccati recursion P <- Q + A'PA - A'PB(R+B'PB)^-1 B'PA
/// started at P = Q and run until successive gains agree to `tol`.
Eigen::MatrixXd ValueIterationGain(const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B,
                                   const Eigen::MatrixXd& Q,
                                   const Eigen::MatrixXd& R,
                                   double tol = 1e-13,
                                   int max_iter = 2000000);

/// Stopping distance by trapezoidal integration of the braking profile
/// (linear ramp to `a` over `t_ramp`, then constant) at step `h`.
double IntegratedStoppingDistance(double v0, double a, double t_ramp,
                                  double h = 1e-4);

/// Moduli of the eigenvalues of a real 2x2 matrix, descending.
std::array<double, 2> Eigen2x2Moduli(const Eigen::Matrix2d& m);

/// Mean and standard deviation of N(mean, stddev^2) conditioned on > 0,
/// by Simpson integration of the density.
std::array<double, 2> TruncatedGaussianMoments(double mean, double stddev);

/// True when the straight segment from `from` to `to` passes through the
/// interior of `rect` shrunk by `eps` (Liang-Barsky clipping).
bool SegmentCrossesInterior(Vec2 from, Vec2 to, const Rect& rect,
                            double eps = 1e-9);

/// Brute-force visibility of a point: within range and field of view, and
/// no occluder interior on the sight line.
bool RayCastVisible(Vec2 sensor, double r_visible, double fov_half_angle,
                    const std::vector<Rect>& occluders, Vec2 point);

struct OracleVisibleSets {
  std::vector<int> pedestrians;
  std::vector<int> parked_cars;
  bool crosswalk = false;
};

/// Visible-object sets computed by ray casting against the raw world
/// geometry. Pedestrians never occlude.
OracleVisibleSets RayCastVisibleSets(const WorldState& world,
                                     const SensorSpec& sensor);

/// Risk scan that first lists every look-ahead point with its zone and only
/// then folds the per-zone maxima and the state.
ScanResult ReferenceScan(const Perception& scene, const RiskZones& zones,
                         const PolicyThresholds& policy,
                         const EstimatorParams& estimator);

/// Small random world: a short road with a few cars and pedestrians placed
/// anywhere on the sidewalks or road, ego at a random position.
WorldState RandomSmallWorld(std::mt19937_64& rng);

/// Random stabilizable (A, B) pair with Q >= 0, R > 0 of state dimension n
/// and input dimension m.
struct LqrProblem {
  Eigen::MatrixXd A, B, Q, R;
};
LqrProblem RandomLqrProblem(std::mt19937_64& rng, int n, int m);

}  // namespace occrisk::testing

#endif  // OCCRISK_TESTS_TEST_ORACLES_H_
