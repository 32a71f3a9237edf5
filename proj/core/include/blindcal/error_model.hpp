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

#ifndef BLINDCAL_ERROR_MODEL_HPP
#define BLINDCAL_ERROR_MODEL_HPP

#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blindcal/operators.hpp"

namespace blindcal {

// Raw device error quantities. Rotation fractions are in units of pi/2
// pulses, spillover/readout entries are probabilities, phases are radians.
struct PhysicalParams {
  double xi_or = 0.0;    // over/under-rotation fraction of a pi/2 pulse
  double p0 = 0.0;       // dark error probability
  double p1 = 0.0;       // bright error probability
  double p_left = 0.0;   // spillover onto the left detector
  double p_right = 0.0;  // spillover onto the right detector
  double xi_l = 0.0;     // beam crosstalk fraction onto the left neighbor
  double xi_r = 0.0;     // beam crosstalk fraction onto the right neighbor
  double phi_l = 0.0;    // crosstalk phase offset, left
  double phi_r = 0.0;    // crosstalk phase offset, right
  double xi_nnl = 0.0;   // next-nearest-neighbor crosstalk, left
  double xi_nnr = 0.0;   // next-nearest-neighbor crosstalk, right
  double phi_nnl = 0.0;
  double phi_nnr = 0.0;

  // Throws std::invalid_argument when probabilities leave [0,1] or fractions
  // leave [-1,1]. Phases are reduced into [0, 2*pi) first.
  void validate_and_normalize();

  bool all_zero() const;

  nlohmann::json to_json() const;
  static PhysicalParams from_json(const nlohmann::json& j);

  // Parameter values used throughout the numerical benchmarks.
  static PhysicalParams benchmark_defaults();
};

// Error mechanisms. Crosstalk flags are cumulative refinements: asymmetric
// requires symmetric, phase requires asymmetric, next-nearest requires phase.
enum class ErrorKind {
  over_rotation,
  dark_bright,
  spillover,
  crosstalk_symmetric,
  crosstalk_asymmetric,
  crosstalk_phase,
  crosstalk_nnn,
};

const std::string& error_kind_name(ErrorKind kind);
ErrorKind error_kind_from_name(const std::string& name);

// Which error mechanisms a linear measurement model includes, and the box
// constraints of the resulting coefficients.
struct ErrorModelSpec {
  int n = 0;
  std::vector<ErrorKind> errors;  // ordered; order fixes the coefficient layout
  std::map<std::string, std::pair<double, double>> range_overrides;

  bool has(ErrorKind kind) const;
  // 0 = none, 1 = symmetric, 2 = asymmetric, 3 = asymmetric with phase.
  int crosstalk_level() const;

  // Validates qubit count, nesting and duplicate flags.
  void validate() const;

  // Zeroes (or ties, for symmetric crosstalk) the parameters of mechanisms
  // this spec does not model, so that a smaller spec sees exactly the
  // physics of the smaller model.
  PhysicalParams mask_params(const PhysicalParams& params) const;

  nlohmann::json to_json() const;
  static ErrorModelSpec from_json(const nlohmann::json& j);

  // The standard nine-coefficient model: dark/bright, spillover,
  // over-rotation and asymmetric beam crosstalk with phase.
  static ErrorModelSpec nine_parameter(int n);
};

// Names and box constraints of the linear coefficients, entry 0 = "ideal".
struct CoefficientLayout {
  std::vector<std::string> names;
  std::vector<std::pair<double, double>> box;

  int size() const { return static_cast<int>(names.size()); }
  // Index of a named coefficient, -1 when absent.
  int index_of(const std::string& name) const;
};

CoefficientLayout coefficient_layout(const ErrorModelSpec& spec);

// Number of error coefficients k (layout size minus the ideal entry).
int parameter_count(const ErrorModelSpec& spec);

bool is_readout_coefficient(const std::string& name);

// A named, range-constrained linear coefficient vector with values[0] the
// weight of the ideal operator.
struct CalibrationVector {
  CoefficientLayout layout;
  rvec values;

  double at(const std::string& name) const;
  nlohmann::json to_json() const;
  static CalibrationVector from_json(const nlohmann::json& j);
};

// The perfectly calibrated vector (1, 0, ..., 0).
CalibrationVector ideal_xi(const ErrorModelSpec& spec);

// Linearized coefficients of the physical parameters. Crosstalk-with-phase
// blocks map to the products xi*cos(phi), xi*sin(phi).
CalibrationVector zeta_to_xi(const ErrorModelSpec& spec, const PhysicalParams& params);

// Inverse of zeta_to_xi; crosstalk products invert as polar coordinates.
PhysicalParams xi_to_zeta(const ErrorModelSpec& spec, const CalibrationVector& xi);

// ---------------------------------------------------------------------------
// Readout errors (classical, acting on outcome labels)
// ---------------------------------------------------------------------------

// Exact composed column-stochastic matrix on the 2^n outcome labels:
// per-qubit dark/bright flips first, then pairwise detector spillover for
// adjacent pairs (1,2), (2,3), ... in that application order.
rmat readout_stochastic_exact(const PhysicalParams& params, int num_qubits);

// As above but restricted to the mechanisms of the spec.
rmat readout_stochastic_matrix(const ErrorModelSpec& spec, const PhysicalParams& params);

// Exact first derivative of the composed stochastic matrix at zero along one
// readout coefficient ("p0", "p1", "p_left", "p_right"). Entries are exact
// integers; columns sum to zero.
rmat readout_derivative(const std::string& coeff_name, int num_qubits);

// ---------------------------------------------------------------------------
// Rotation errors (coherent, acting through the pre-measurement pulses)
// ---------------------------------------------------------------------------

// exp(-i theta/2 (cos(beta) X + sin(beta) Y)).
cmat equatorial_rotation(double beta, double theta);

// Per-qubit factors V_q of the miscalibrated pre-measurement unitary for
// basis p: target pulses (X via R_y(-pi/2), Y via R_x(+pi/2), Z none) with
// over-rotation, plus crosstalk pulses received from neighbors. Pulses are
// applied in ascending qubit order; only single-qubit rotations occur, so
// the full unitary factorizes.
std::vector<cmat> premeasure_qubit_unitaries(const PhysicalParams& params,
                                             const PauliString& p);

// Tensor product of the per-qubit factors.
cmat premeasure_unitary(const PhysicalParams& params, const PauliString& p);

// Effective single-qubit observables M_q = V_q^dagger Z V_q.
std::vector<cmat> effective_qubit_observables(const PhysicalParams& params,
                                              const PauliString& p);

// One linear rotation coefficient together with the one-parameter family of
// physical parameters whose derivative at zero defines its operator.
struct RotationCoefficient {
  std::string name;
  std::function<PhysicalParams(double)> at;
};

std::vector<RotationCoefficient> rotation_coefficients(const ErrorModelSpec& spec);

// Central finite-difference step for rotation-coefficient derivatives.
inline constexpr double kRotationFdStep = 1e-6;

// d M_q / d coeff at zero for every qubit, by central differences of the
// exact single-qubit conjugation.
std::vector<cmat> qubit_observable_derivatives(const RotationCoefficient& coeff,
                                               const PauliString& p);

// Per-basis first-order expansion data used to assemble measurement maps:
// exact ideal single-qubit Paulis plus per-coefficient qubit derivatives.
struct BasisExpansion {
  std::vector<cmat> ideal;                      // 2x2 per qubit
  std::vector<std::string> coefficient_names;   // rotation coefficients only
  std::vector<std::vector<cmat>> derivatives;   // [coefficient][qubit], 2x2
};

BasisExpansion basis_rotation_expansion(const ErrorModelSpec& spec, const PauliString& p);

// First-order expansion of the full n-qubit effective observable:
// [("ideal", pauli_operator(p)), (coefficient name, dM/dcoeff at 0), ...].
std::vector<std::pair<std::string, cmat>> rotation_error_transform(
    const ErrorModelSpec& spec, const PauliString& p);

}  // namespace blindcal

#endif
