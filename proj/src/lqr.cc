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

#include "occrisk/lqr.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "occrisk/world.h"

namespace occrisk {
namespace {

void CheckWeights(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                  const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const auto n = A.rows();
  const auto m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m) {
    throw std::invalid_argument("LQR matrix dimensions do not agree");
  }
  if ((Q - Q.transpose()).norm() > 1e-10 * std::max(1.0, Q.norm())) {
    throw std::invalid_argument("Q must be symmetric");
  }
  if ((R - R.transpose()).norm() > 1e-10 * std::max(1.0, R.norm())) {
    throw std::invalid_argument("R must be symmetric");
  }
  // An LDLT with a negative pivot means Q is indefinite.
  Eigen::LDLT<Eigen::MatrixXd> q_ldlt(Q);
  if (q_ldlt.info() != Eigen::Success ||
      (q_ldlt.vectorD().array() < -1e-12).any()) {
    throw std::invalid_argument("Q must be positive semidefinite");
  }
  Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  if (r_llt.info() != Eigen::Success) {
    throw std::invalid_argument("R must be positive definite");
  }
}

double RiccatiResidual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                       const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                       const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BtPA = B.transpose() * P * A;
  const Eigen::MatrixXd S = R + B.transpose() * P * B;
  const Eigen::MatrixXd rhs =
      Q + A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA);
  return (rhs - P).norm();
}

}  // namespace

JerkStateSpaces BuildStateSpaces(double dt, double j_yield, double j_cruise) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  JerkStateSpaces ss;
  ss.yield.A.resize(3, 3);
  ss.yield.A << 1.0, -dt, 0.0,  //
      0.0, 1.0, dt,             //
      0.0, 0.0, 1.0;
  ss.yield.B.resize(3, 1);
  ss.yield.B << 0.0, j_yield * dt * dt, j_yield * dt;
  ss.cruise.A.resize(2, 2);
  ss.cruise.A << 1.0, dt,  //
      0.0, 1.0;
  ss.cruise.B.resize(2, 1);
  ss.cruise.B << j_cruise * dt * dt, j_cruise * dt;
  return ss;
}

RiccatiSolution SolveDiscreteRiccati(const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& R,
                                     const RiccatiOptions& options) {
  CheckWeights(A, B, Q, R);
  const auto n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  // Doubling iteration on (A_k, G_k, H_k) with G_0 = B R^-1 B', H_0 = Q.
  // H_k converges to the stabilizing solution.
  Eigen::MatrixXd Ak = A;
  Eigen::MatrixXd Gk = B * R.llt().solve(B.transpose());
  Eigen::MatrixXd Hk = Q;
  double change = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= options.max_iterations; ++k) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> W(I + Gk * Hk);
    const Eigen::MatrixXd WinvA = W.solve(Ak);
    const Eigen::MatrixXd WinvG = W.solve(Gk);
    const Eigen::MatrixXd H_next = Hk + Ak.transpose() * Hk * WinvA;
    const Eigen::MatrixXd G_next = Gk + Ak * WinvG * Ak.transpose();
    const Eigen::MatrixXd A_next = Ak * WinvA;
    change = (H_next - Hk).norm() / std::max(1.0, H_next.norm());
    Ak = A_next;
    Gk = 0.5 * (G_next + G_next.transpose());
    Hk = 0.5 * (H_next + H_next.transpose());
    if (!Hk.allFinite()) break;
    if (change <= options.tolerance) {
      return {Hk, k, RiccatiResidual(A, B, Q, R, Hk)};
    }
  }
  throw SynthesisError(
      "Riccati iteration did not converge in " +
          std::to_string(options.max_iterations) +
          " iterations (last relative change " + std::to_string(change) +
          "); check that (A, B) is stabilizable",
      options.max_iterations, change);
}

Eigen::MatrixXd GainFromRiccati(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& R,
                                const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd S = R + B.transpose() * P * B;
  return S.ldlt().solve(B.transpose() * P * A);
}

Eigen::MatrixXd SynthesizeGain(const Eigen::MatrixXd& Q,
                               const Eigen::MatrixXd& R,
                               const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B,
                               const RiccatiOptions& options) {
  const RiccatiSolution sol = SolveDiscreteRiccati(A, B, Q, R, options);
  return GainFromRiccati(A, B, R, sol.P);
}

Eigen::VectorXd EigenvalueModuli(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs();
}

double SpectralRadius(const Eigen::MatrixXd& M) {
  return EigenvalueModuli(M).maxCoeff();
}

bool GainSet::operator==(const GainSet& o) const {
  return k_cruise == o.k_cruise && k_yield == o.k_yield &&
         q_cruise == o.q_cruise && r_cruise == o.r_cruise &&
         q_yield == o.q_yield && r_yield == o.r_yield &&
         j_yield == o.j_yield && j_cruise == o.j_cruise;
}

void GainSet::Validate(double dt) const {
  if (!(j_yield > 0.0) || !(j_cruise > 0.0)) {
    throw ConfigError("jerk scales j_yield and j_cruise must be > 0");
  }
  if (!k_cruise.allFinite() || !k_yield.allFinite()) {
    throw ConfigError("controller gains must be finite");
  }
  const JerkStateSpaces ss = BuildStateSpaces(dt, j_yield, j_cruise);
  const double rho_cruise =
      SpectralRadius(ss.cruise.A - ss.cruise.B * k_cruise);
  const double rho_yield = SpectralRadius(ss.yield.A - ss.yield.B * k_yield);
  if (!(rho_cruise < 1.0) || !(rho_yield < 1.0)) {
    throw ConfigError("closed loop is not stable at dt = " +
                      std::to_string(dt) + " (cruise spectral radius " +
                      std::to_string(rho_cruise) + ", yield " +
                      std::to_string(rho_yield) + ")");
  }
}

std::string_view ToString(GainMode mode) {
  return mode == GainMode::kCruise ? "cruise" : "yield";
}

GainMode ParseGainMode(std::string_view text) {
  if (text == "cruise") return GainMode::kCruise;
  if (text == "yield") return GainMode::kYield;
  throw ConfigError("unknown gain mode '" + std::string(text) +
                    "' (expected cruise or yield)");
}

GainReport MakeGainReport(GainMode mode, double dt, const GainSet& gains) {
  const JerkStateSpaces ss =
      BuildStateSpaces(dt, gains.j_yield, gains.j_cruise);
  const StateSpace& sys = mode == GainMode::kCruise ? ss.cruise : ss.yield;
  Eigen::MatrixXd Q, R;
  GainReport report;
  report.mode = mode;
  report.dt = dt;
  if (mode == GainMode::kCruise) {
    Q = gains.q_cruise;
    R = gains.r_cruise;
    report.reference = gains.k_cruise;
  } else {
    Q = gains.q_yield;
    R = gains.r_yield;
    report.reference = gains.k_yield;
  }
  const RiccatiSolution sol = SolveDiscreteRiccati(sys.A, sys.B, Q, R);
  report.iterations = sol.iterations;
  report.synthesized = GainFromRiccati(sys.A, sys.B, R, sol.P);
  report.synthesized_moduli =
      EigenvalueModuli(sys.A - sys.B * report.synthesized);
  report.reference_moduli = EigenvalueModuli(sys.A - sys.B * report.reference);
  report.deviation =
      (report.synthesized - report.reference).cwiseAbs().maxCoeff();
  return report;
}

std::vector<GainReport> SweepGainReports(GainMode mode, double dt_min,
                                         double dt_max, int samples,
                                         const GainSet& gains) {
  if (samples < 1 || !(dt_min > 0.0) || dt_max < dt_min) {
    throw std::invalid_argument("invalid dt sweep");
  }
  std::vector<GainReport> out;
  for (int i = 0; i < samples; ++i) {
    const double dt =
        samples == 1 ? dt_min
                     : dt_min + (dt_max - dt_min) * i / (samples - 1);
    out.push_back(MakeGainReport(mode, dt, gains));
  }
  return out;
}

}  // namespace occrisk
