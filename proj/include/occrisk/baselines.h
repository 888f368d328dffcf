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

#ifndef OCCRISK_BASELINES_H_
#define OCCRISK_BASELINES_H_

#include <optional>
#include <string_view>

#include "occrisk/controller.h"

namespace occrisk {

/// Fixed-speed reference drivers. They share the yield and emergency logic
/// of LongitudinalController but ignore occlusion entirely; the drive state
/// is always NormalDrive with comfort limits.
class ConstantSpeedController : public LongitudinalController {
 public:
  /// Tracks `fraction` of the speed limit.
  ConstantSpeedController(ControllerContext context, double fraction,
                          std::string_view name);

  std::string_view name() const override { return name_; }

 protected:
  DriveChoice ChooseDrive(const Perception& scene,
                          const RiskZones& zones) override;

 private:
  double fraction_;
  std::string_view name_;
};

/// B1: drives at the speed limit.
class SpeedLimitBaseline final : public ConstantSpeedController {
 public:
  explicit SpeedLimitBaseline(ControllerContext context)
      : ConstantSpeedController(std::move(context), 1.0, "B1") {}
};

/// B2: drives at two thirds of the speed limit.
class ReducedSpeedBaseline final : public ConstantSpeedController {
 public:
  explicit ReducedSpeedBaseline(ControllerContext context)
      : ConstantSpeedController(std::move(context), 2.0 / 3.0, "B2") {}
};

/// B3: drives at the speed limit, slowing to a third of it once a crosswalk
/// is seen within `slow_distance` ahead and until the ego has passed it.
class CrosswalkBaseline final : public LongitudinalController {
 public:
  static constexpr double kDefaultSlowDistance = 20.0;
  static constexpr double kSlowFraction = 1.0 / 3.0;

  explicit CrosswalkBaseline(ControllerContext context,
                             double slow_distance = kDefaultSlowDistance);
  std::string_view name() const override { return "B3"; }

 protected:
  DriveChoice ChooseDrive(const Perception& scene,
                          const RiskZones& zones) override;

 private:
  double slow_distance_;
  std::optional<double> crosswalk_;
};

}  // namespace occrisk

#endif  // OCCRISK_BASELINES_H_
