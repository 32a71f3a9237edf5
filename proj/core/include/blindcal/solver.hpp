// Copyright 2026 The blindcal developers
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

#ifndef BLINDCAL_SOLVER_HPP
#define BLINDCAL_SOLVER_HPP

#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "blindcal/exceptions.hpp"
#include "blindcal/measurement_map.hpp"

namespace blindcal {

// How the state iterate is rescaled after each rank-constrained PSD
// projection. gauge_shift divides by the trace and multiplies the trace into
// the calibration vector (the objective is invariant); project replaces the
// rescaling by a trace-one projection; none leaves the iterate as projected.
enum class Normalization { none, gauge_shift, project };

std::string normalization_name(Normalization n);
Normalization normalization_from_name(const std::string& name);

struct SolverConfig {
  int rank = 1;
  double epsilon = 1e-2;        // relative-residual stopping threshold
  int max_iters = 100;
  double init_xi_region = 0.15;  // fractional radius around the anticipated xi
  double init_rho_region = 0.10; // fractional perturbation around the target
  bool allow_sign_flip = true;
  int restarts = 8;
  Normalization normalization = Normalization::gauge_shift;

  nlohmann::json to_json() const;
  // Applies the keys present in j on top of this config.
  SolverConfig with_overrides(const nlohmann::json& j) const;
};

struct SolverResult {
  cmat rho_hat;
  CalibrationVector xi_hat;
  std::vector<double> residual_history;  // relative residual per iteration
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  std::uint64_t seed = 0;
  int restart_index = 0;

  nlohmann::json to_json() const;
};

// G - (I - P_U) G (I - P_U) with P_U spanned by the top-r eigenvectors of rho.
cmat tangent_project(const cmat& gradient, const cmat& rho, int rank);

// Keep the r largest nonnegative eigenvalues, zero the rest.
cmat psd_rank_project(const cmat& a, int rank);

// Shift-and-clip eigenvalues so the top-r nonnegative part has unit trace
// (water-filling); output is PSD, trace one, rank at most r.
cmat trace_one_project(const cmat& a, int rank);

// Entrywise clamp onto the box constraints.
rvec project_xi(const rvec& xi, const std::vector<std::pair<double, double>>& box);

// (rho / tr, tr * xi); the data model is invariant under this rescaling.
std::pair<cmat, rvec> gauge_normalize(const cmat& rho_proj, const rvec& xi);

// ||PG||_F^2 / ||A_xi(PG)||_2^2 for the state step. Returns 0 when the image
// vanishes (exact-fit stop).
double state_step_width(const MeasurementMap& map, const rvec& xi,
                        const cmat& projected_gradient);

// Same ratio for the calibration step, without a tangent projection.
double xi_step_width(const MeasurementMap& map, const cmat& rho, const rvec& gradient);

double relative_residual(const MeasurementMap& map, const rvec& y, const rvec& xi,
                         const cmat& rho);

// Alternating gradient descent over (rho, xi): Riemannian rho steps on the
// rank-r PSD manifold with sign-flip-aware projection and gauge fixing,
// Euclidean xi steps with box projection. Runs config.restarts random
// initializations around (target_psi, anticipated_xi) and returns the
// lowest-residual result.
SolverResult blind_calibrate(const MeasurementMap& map, const DataVector& data,
                             const SolverConfig& config,
                             const CalibrationVector& anticipated_xi,
                             const cvec& target_psi, std::uint64_t seed);

// Fixed-calibration least-squares state fit at full rank (r = D), starting
// from the maximally mixed state, with a final trace-one projection.
cmat calibrated_tomography(const MeasurementMap& map, const DataVector& data,
                           const CalibrationVector& xi_fixed, const SolverConfig& config);

}  // namespace blindcal

#endif
