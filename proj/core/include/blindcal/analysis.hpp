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

#ifndef BLINDCAL_ANALYSIS_HPP
#define BLINDCAL_ANALYSIS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blindcal/simulator.hpp"
#include "blindcal/solver.hpp"

namespace blindcal {

// ---------------------------------------------------------------------------
// Small utilities shared by the sweeps
// ---------------------------------------------------------------------------

// Runs body(0..count-1) on up to `jobs` threads. Work items must be
// independent; results should be written into pre-sized slots by index.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

// Least-squares slope/intercept of log(y) against log(x).
std::pair<double, double> loglog_fit(const rvec& x, const rvec& y);

// Rank correlation with average ranks for ties.
double spearman_correlation(const rvec& a, const rvec& b);

// CSV/JSON table with a header row; every emitted row carries the seed that
// reproduces it.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
  nlohmann::json to_json() const;
  // Writes <directory>/<name>.csv and <directory>/<name>.json.
  void save(const std::string& directory, const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Quality metrics
// ---------------------------------------------------------------------------

// Mean absolute deviation over the k error coefficients; the gauge-dependent
// ideal entry is excluded.
double calibration_error(const rvec& xi, const rvec& tau);
double calibration_error(const CalibrationVector& xi, const CalibrationVector& tau);

struct CalibrationAssessment {
  double E = std::numeric_limits<double>::quiet_NaN();  // set when truth is known
  double td_target = 0.0;
  double td_delta = 0.0;  // td_target minus the standard candidate's td_target
  double dominant_eigenvalue = 0.0;
};

// Runs calibrated tomography once per candidate calibration on the same data
// and reports distances to the target. Candidates must include "standard",
// the td_delta reference.
std::map<std::string, CalibrationAssessment> assess(
    const MeasurementMap& map, const DataVector& data,
    const std::map<std::string, CalibrationVector>& xi_candidates, const cvec& target_psi,
    const SolverConfig& tomography_config,
    const CalibrationVector* truth = nullptr);

// ---------------------------------------------------------------------------
// Probe-state sensitivities and optimization
// ---------------------------------------------------------------------------

// Euclidean norm of the data shift the calibration induces on this state.
double sensitivity_s1(const MeasurementMap& map, const CalibrationVector& xi,
                      const cmat& rho);

// Distance between the ideal-map least-squares reconstruction of the shifted
// data and its projection onto rank-r states. Throws NumericalError when the
// ideal map is ill-conditioned (condition number above 1e8).
double sensitivity_s2(const MeasurementMap& map, const CalibrationVector& xi,
                      const cmat& rho, int rank);

struct ProbeOptimizationConfig {
  enum class Objective { mean_error, max_error };
  Objective objective = Objective::mean_error;
  bool shot_noise = false;
  long long shots = 1000;
  bool normalize_error = true;  // mean vs summed absolute deviation
  int budget = 50;              // objective evaluations
  int grid_points_per_param = 5;
  PhysicalParams expected = PhysicalParams::benchmark_defaults();
  SolverConfig solver;
  int top_k = 6;
};

struct ScoredProbeState {
  ProductStateSpec state;
  double score = std::numeric_limits<double>::quiet_NaN();
};

// Aggregated blind-calibration error of a candidate probe state over a grid
// of calibrations: each coefficient swept over grid_points_per_param values
// in [0, 2 x expected], one at a time, plus the joint expected point.
double probe_objective(const ProbeOptimizationConfig& config, const ErrorModelSpec& spec,
                       const ProductStateSpec& state, std::uint64_t seed);

// Budget-bounded coordinate-cycling pattern search over per-qubit Bloch
// angles, minimizing probe_objective. Returns evaluated states ranked best
// first (top_k of them); a zero budget returns the seed state unevaluated.
std::vector<ScoredProbeState> optimize_probe_states(const ProbeOptimizationConfig& config,
                                                    const ErrorModelSpec& spec,
                                                    const ProductStateSpec& seed_state,
                                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

struct TestDataset {
  std::string name;
  DataVector data;
  cvec target;
};

struct ModelSelectionRow {
  std::string spec_name;
  int num_params = 0;
  double E = std::numeric_limits<double>::quiet_NaN();
  double final_residual = 0.0;
  double mean_td_delta = 0.0;
  std::map<std::string, double> td_delta_per_state;
  std::uint64_t seed = 0;
};

// Blind calibration on the probe data once per candidate spec, then
// calibrated tomography of every test state with the recovered parameters;
// td_delta is relative to standard tomography of the same data.
std::vector<ModelSelectionRow> model_selection_sweep(
    const std::vector<std::pair<std::string, ErrorModelSpec>>& specs,
    const DataVector& probe_data, const cvec& probe_target,
    const std::vector<TestDataset>& test_sets, const SolverConfig& solve_config,
    const SolverConfig& tomography_config, const std::optional<PhysicalParams>& truth,
    std::uint64_t seed, int jobs = 1);

// The nested parameter subsets used for model selection, largest first:
// full nine-parameter model, then successively removing over-rotation,
// crosstalk phase, crosstalk magnitude and spillover.
std::vector<std::pair<std::string, ErrorModelSpec>> model_selection_sets(int n);

// Cumulative error-model progression by parameter count:
// 2, 4, 5, 6, 7, 9, 13 coefficients.
std::vector<std::pair<std::string, ErrorModelSpec>> parameter_count_progression(int n);

// ---------------------------------------------------------------------------
// Bootstrap error bars
// ---------------------------------------------------------------------------

struct BootstrapReport {
  std::vector<std::string> names;  // coefficient names including "ideal"
  rvec reported;                   // the original solve
  rvec std_dev;                    // spread of the resampled distribution
  rvec median_offset;              // |reported - resample median|
  int resamples = 0;

  nlohmann::json to_json() const;
};

// Redraws multinomial counts from the empirical frequencies at the original
// shot count, re-solves per resample and reports the two error-bar
// components per coefficient.
BootstrapReport bootstrap_error_bars(const MeasurementMap& map, const DataVector& data,
                                     const SolverConfig& config,
                                     const CalibrationVector& anticipated_xi,
                                     const cvec& target_psi, int resamples,
                                     std::uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------------------
// Benchmark drivers
// ---------------------------------------------------------------------------

struct ShotScalingRow {
  long long shots = 0;
  int trials = 0;
  double mean_E = 0.0, std_E = 0.0;
  double mean_td = 0.0, std_td = 0.0;
  std::uint64_t seed = 0;
};

// Independent simulate-and-calibrate trials per shot count; TD is measured on
// a full-rank tomography re-fit with the recovered calibration.
std::vector<ShotScalingRow> shot_scaling_benchmark(
    const ErrorModelSpec& spec, const CircuitSpec& state, const PhysicalParams& zeta_true,
    const std::vector<long long>& shot_grid, int trials, const SolverConfig& solve_config,
    const SolverConfig& tomography_config, std::uint64_t seed, int jobs = 1);

struct ParamCountRow {
  std::string spec_name;
  int num_params = 0;
  double mean_E = 0.0, std_E = 0.0;
  std::uint64_t seed = 0;
};

std::vector<ParamCountRow> parameter_count_benchmark(
    int n, const CircuitSpec& state, const PhysicalParams& zeta_true, long long shots,
    int trials, const SolverConfig& solve_config, std::uint64_t seed, int jobs = 1);

struct ModeComparisonRow {
  long long shots = 0;
  int trials = 0;
  double mean_E_projective = 0.0, mean_E_expectation = 0.0;
  double mean_td_projective = 0.0, mean_td_expectation = 0.0;
  std::uint64_t seed = 0;
};

// Paired trials: the same sampled counts are fit once through the projective
// map and once through its expectation-value collapse.
std::vector<ModeComparisonRow> projective_vs_expectation_benchmark(
    const ErrorModelSpec& spec, const CircuitSpec& state, const PhysicalParams& zeta_true,
    const std::vector<long long>& shot_grid, int trials, const SolverConfig& solve_config,
    const SolverConfig& tomography_config, std::uint64_t seed, int jobs = 1);

struct NormalizationRow {
  std::string method;
  double mean_E = 0.0, std_E = 0.0;
  double mean_td = 0.0, std_td = 0.0;
  std::uint64_t seed = 0;
};

std::vector<NormalizationRow> normalization_benchmark(
    const ErrorModelSpec& spec, const CircuitSpec& state, const NoiseSpec& noise,
    const PhysicalParams& zeta_true, long long shots, int trials,
    const SolverConfig& solve_config, const SolverConfig& tomography_config,
    std::uint64_t seed, int jobs = 1);

struct TdValidityRow {
  std::string state;
  double c = 0.0;  // calibration scaling (1-c) ideal + c actual
  double mean_td_target = 0.0, std_td_target = 0.0;
  double mean_td_prepared = 0.0, std_td_prepared = 0.0;
  std::uint64_t seed = 0;
};

std::vector<TdValidityRow> td_validity_sweep(
    const ErrorModelSpec& spec, const std::vector<CircuitSpec>& states,
    const std::vector<std::string>& state_names, const NoiseSpec& noise,
    const PhysicalParams& zeta_true, const std::vector<double>& c_grid, long long shots,
    int trials, const SolverConfig& tomography_config, std::uint64_t seed, int jobs = 1);

}  // namespace blindcal

#endif
