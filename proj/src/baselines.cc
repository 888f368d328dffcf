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

#include "occrisk/baselines.h"

#include <utility>

namespace occrisk {
namespace {

DriveChoice ComfortDrive(const ControllerContext& context, double v_ref) {
  DriveChoice choice;
  choice.state = FsmState::kNormalDrive;
  choice.v_ref = v_ref;
  choice.a_limit = context.comfort.a_level;
  choice.j_limit = context.gains.j_cruise;
  return choice;
}

}  // namespace

ConstantSpeedController::ConstantSpeedController(ControllerContext context,
                                                 double fraction,
                                                 std::string_view name)
    : LongitudinalController(std::move(context)),
      fraction_(fraction),
      name_(name) {}

DriveChoice ConstantSpeedController::ChooseDrive(const Perception& scene,
                                                 const RiskZones& /*zones*/) {
  return ComfortDrive(context(), fraction_ * scene.road.speed_limit);
}

CrosswalkBaseline::CrosswalkBaseline(ControllerContext context,
                                     double slow_distance)
    : LongitudinalController(std::move(context)),
      slow_distance_(slow_distance) {}

DriveChoice CrosswalkBaseline::ChooseDrive(const Perception& scene,
                                           const RiskZones& /*zones*/) {
  if (scene.crosswalk_position) {
    const double ahead = *scene.crosswalk_position - scene.EgoFront();
    if (ahead >= 0.0 && ahead <= slow_distance_) {
      crosswalk_ = scene.crosswalk_position;
    }
  }
  if (crosswalk_ && scene.EgoRear() >
                        *crosswalk_ + 0.5 * scene.road.crosswalk_width) {
    crosswalk_.reset();
  }
  const double fraction = crosswalk_ ? kSlowFraction : 1.0;
  return ComfortDrive(context(), fraction * scene.road.speed_limit);
}

}  // namespace occrisk
