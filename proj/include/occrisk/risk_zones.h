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

#ifndef OCCRISK_RISK_ZONES_H_
#define OCCRISK_RISK_ZONES_H_

#include <stdexcept>

namespace occrisk {

/// Braking that ramps linearly from 0 to `a_level` over `t_ramp`, then holds.
struct BrakingProfile {
  double a_level = 2.0;
  double t_ramp = 0.9;

  friend bool operator==(const BrakingProfile&,
                         const BrakingProfile&) = default;
};

/// Thrown when a profile cannot bring a moving vehicle to rest.
class NeverStopsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Span {
  double begin = 0.0;
  double end = 0.0;
  double Length() const { return end - begin; }
};

struct RiskZones {
  double d_stop_min = 0.0;
  double d_stop_comfort = 0.0;
  double r_visible = 0.0;
  /// Set when d_stop_comfort exceeds the sensing range; the safety span is
  /// then empty.
  bool safety_truncated = false;

  Span Danger() const { return {0.0, d_stop_min}; }
  Span Discomfort() const { return {d_stop_min, d_stop_comfort}; }
  Span Safety() const;
};

/// Distance covered from speed `v0` until rest under `profile`. Constant-jerk
/// ramp (j = a_level / t_ramp) followed by constant deceleration; when the
/// vehicle stops during the ramp, the ramp root is used.
double StoppingDistance(double v0, const BrakingProfile& profile);

/// Splits the look-ahead into danger, discomfort and safety spans. Throws
/// ConfigError when the physical profile stops later than the
/// comfort profile.
RiskZones ComputeRiskZones(double v0, const BrakingProfile& comfort,
                           const BrakingProfile& physical, double r_visible);

}  // namespace occrisk

#endif  // OCCRISK_RISK_ZONES_H_
