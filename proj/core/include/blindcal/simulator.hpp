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

#ifndef BLINDCAL_SIMULATOR_HPP
#define BLINDCAL_SIMULATOR_HPP

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "blindcal/error_model.hpp"
#include "blindcal/measurement_map.hpp"
#include "blindcal/operators.hpp"

namespace blindcal {

// Per-qubit Bloch angles in units of pi radians.
struct ProductStateSpec {
  std::vector<double> theta;
  std::vector<double> phi;

  // Folds theta into [0, 1] and phi into [0, 2), preserving the state.
  void normalize_angles();
};

struct CircuitSpec {
  enum class Kind { product, ghz, random_deep };

  Kind kind = Kind::product;
  int n = 0;
  ProductStateSpec angles;   // product states and the single-qubit layer
  std::vector<double> chi;   // entangling angles in radians, pairs (i,j), i<j,
                             // lexicographic; pi/4 is fully entangling

  static CircuitSpec product(std::vector<double> theta, std::vector<double> phi);
  static CircuitSpec ghz(int n);
  static CircuitSpec random_deep(std::vector<double> theta, std::vector<double> phi,
                                 std::vector<double> chi);

  // Probe and test states available by name: OS1..OS6, RP1..RP4, zero, plus,
  // ghz, RD1, RD2 (case-insensitive).
  static CircuitSpec builtin(const std::string& name);
  static bool is_builtin(const std::string& name);
  static std::vector<std::string> builtin_names();

  // Noiseless pure state the circuit prepares.
  cvec target_state() const;

  nlohmann::json to_json() const;
  static CircuitSpec from_json(const nlohmann::json& j);

  void validate() const;
};

struct NoiseSpec {
  double pauli_noise_per_gate = 0.0;
  std::uint64_t rng_seed = 0;  // reserved for trajectory-style extensions

  nlohmann::json to_json() const;
  static NoiseSpec from_json(const nlohmann::json& j);
};

// Density-matrix preparation. Each gate is followed by an X/Y/Z Pauli channel
// of total strength pauli_noise_per_gate on every qubit the gate touches.
cmat prepare_state(const CircuitSpec& circuit, const NoiseSpec& noise);

// The verification oracle: conjugate rho by the exact miscalibrated
// pre-measurement unitary of every Pauli basis, take computational-basis Born
// probabilities and push them through the exact composed readout matrix.
// Output rows are in (basis, outcome) lexicographic order.
rvec exact_channel_probabilities(const PhysicalParams& params, const cmat& rho);

// Independent multinomial draws per basis; deterministic given the seed.
// shots_per_basis = 0 returns the probabilities unsampled.
DataVector sample_counts(const rvec& probabilities, int num_qubits,
                         long long shots_per_basis, std::uint64_t seed);

// Adds extra over-rotation and symmetric nearest-neighbor crosstalk on top of
// a base parameter set. Fractions are limited to [0, 0.1].
PhysicalParams inject_miscalibration(const PhysicalParams& base, double extra_or,
                                     double extra_ct);

// Prepare, push through the exact miscalibrated channel and sample.
DataVector simulate_dataset(const PhysicalParams& zeta, const CircuitSpec& circuit,
                            const NoiseSpec& noise, long long shots_per_basis,
                            std::uint64_t seed);

}  // namespace blindcal

#endif
