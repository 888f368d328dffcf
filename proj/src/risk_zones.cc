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

#include "occrisk/risk_zones.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "occrisk/world.h"

namespace occrisk {

Span RiskZones::Safety() const {
  if (safety_truncated) return {r_visible, r_visible};
  return {d_stop_comfort, r_visible};
}

double StoppingDistance(double v0, const BrakingProfile& profile) {
  if (v0 < 0.0 || !std::isfinite(v0)) {
    throw std::invalid_argument("stopping distance needs a finite v0 >= 0");
  }
  if (profile.t_ramp < 0.0) {
    throw std::invalid_argument("braking t_ramp must be >= 0");
  }
  if (v0 == 0.0) return 0.0;
  if (!(profile.a_level > 0.0)) {
    throw NeverStopsError("a_level = " + std::to_string(profile.a_level) +
                          " never stops a vehicle moving at " +
                          std::to_string(v0) + " m/s");
  }
  const double a = profile.a_level;
  const double tr = profile.t_ramp;
  if (tr == 0.0) return v0 * v0 / (2.0 * a);

  const double jerk = a / tr;
  // Speed lost over the full ramp is a * tr / 2.
  if (v0 <= 0.5 * a * tr) {
    const double t_stop = std::sqrt(2.0 * v0 / jerk);
    return v0 * t_stop - jerk * t_stop * t_stop * t_stop / 6.0;
  }
  const double ramp_distance = v0 * tr - a * tr * tr / 6.0;
  const double v_after = v0 - 0.5 * a * tr;
  return ramp_distance + v_after * v_after / (2.0 * a);
}

RiskZones ComputeRiskZones(double v0, const BrakingProfile& comfort,
                           const BrakingProfile& physical, double r_visible) {
  if (!(r_visible > 0.0)) {
    throw std::invalid_argument("r_visible must be > 0");
  }
  RiskZones zones;
  zones.r_visible = r_visible;
  zones.d_stop_min = StoppingDistance(v0, physical);
  zones.d_stop_comfort = StoppingDistance(v0, comfort);
  if (zones.d_stop_min > zones.d_stop_comfort + 1e-12) {
    throw ConfigError(
        "physical stopping distance exceeds the comfort stopping distance; "
        "the comfort profile must be gentler than the physical one");
  }
  zones.safety_truncated = zones.d_stop_comfort > r_visible;
  return zones;
}

}  // namespace occrisk
