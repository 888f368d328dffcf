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

#ifndef OCCRISK_LQR_H_
#define OCCRISK_LQR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace occrisk {

struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

/// Jerk-input longitudinal models. Yield state is [d; v; a] with d the
/// remaining distance to the pedestrian's crossing line; cruise state is
/// [v; a]. The scalar input is a normalized jerk scaled by j_yield / j_cruise.
struct JerkStateSpaces {
  StateSpace cruise;
  StateSpace yield;
};

JerkStateSpaces BuildStateSpaces(double dt, double j_yield, double j_cruise);

class SynthesisError : public std::runtime_error {
 public:
  SynthesisError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct RiccatiOptions {
  /// Relative change of the iterate at which the iteration stops.
  double tolerance = 1e-10;
  int max_iterations = 200;
};

struct RiccatiSolution {
  Eigen::MatrixXd P;
  int iterations = 0;
  /// Frobenius norm of the Riccati residual at P.
  double residual = 0.0;
};

/// Stabilizing solution of
///   P = Q + A'PA - A'PB (R + B'PB)^-1 B'PA
/// by the structure-preserving doubling iteration. Throws
/// std::invalid_argument for malformed Q or R and SynthesisError when the
/// iteration does not settle within `options.max_iterations`.
RiccatiSolution SolveDiscreteRiccati(const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& R,
                                     const RiccatiOptions& options = {});

/// K = (R + B'PB)^-1 B'PA for a given Riccati solution P.
Eigen::MatrixXd GainFromRiccati(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& R,
                                const Eigen::MatrixXd& P);

/// Infinite-horizon discrete LQR gain for u = -K x.
Eigen::MatrixXd SynthesizeGain(const Eigen::MatrixXd& Q,
                               const Eigen::MatrixXd& R,
                               const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B,
                               const RiccatiOptions& options = {});

double SpectralRadius(const Eigen::MatrixXd& M);
Eigen::VectorXd EigenvalueModuli(const Eigen::MatrixXd& M);

/// Controller gains and the weights they came from. Defaults are the
/// published values, shipped verbatim.
struct GainSet {
  Eigen::RowVector2d k_cruise{0.9047, 0.9074};
  Eigen::RowVector3d k_yield{-0.0532, 0.3139, 0.3792};
  Eigen::Matrix2d q_cruise{{1000.0, 0.0}, {0.0, 1.0}};
  Eigen::Matrix<double, 1, 1> r_cruise{{1000.0}};
  Eigen::Matrix3d q_yield{{5.0, 0.0, 0.0}, {0.0, 100.0, 0.0}, {0.0, 0.0, 0.1}};
  Eigen::Matrix<double, 1, 1> r_yield{{1500.0}};
  double j_yield = 2.0;   // m/s^3
  double j_cruise = 0.9;  // m/s^3

  bool operator==(const GainSet& other) const;
  void Validate(double dt) const;
};

enum class GainMode { kCruise, kYield };
std::string_view ToString(GainMode mode);
GainMode ParseGainMode(std::string_view text);

struct GainReport {
  GainMode mode = GainMode::kCruise;
  double dt = 0.0;
  Eigen::RowVectorXd synthesized;
  Eigen::RowVectorXd reference;
  Eigen::VectorXd synthesized_moduli;
  Eigen::VectorXd reference_moduli;
  /// max |synthesized - reference|
  double deviation = 0.0;
  int iterations = 0;
};

/// Synthesizes the gain for `mode` from the weights in `gains` at `dt` and
/// compares it to the shipped gain.
GainReport MakeGainReport(GainMode mode, double dt, const GainSet& gains);

/// Evaluates MakeGainReport on `samples` evenly spaced dt values in
/// [dt_min, dt_max] and returns them all; the caller picks the closest.
std::vector<GainReport> SweepGainReports(GainMode mode, double dt_min,
                                         double dt_max, int samples,
                                         const GainSet& gains);

}  // namespace occrisk

#endif  // OCCRISK_LQR_H_
