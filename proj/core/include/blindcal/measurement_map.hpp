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

#ifndef BLINDCAL_MEASUREMENT_MAP_HPP
#define BLINDCAL_MEASUREMENT_MAP_HPP

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "blindcal/error_model.hpp"
#include "blindcal/exceptions.hpp"
#include "blindcal/operators.hpp"

namespace blindcal {

enum class MapMode { projective, expectation };

// One measurement datum: a Pauli basis plus an outcome bitstring. Rows are
// ordered lexicographically by (basis, outcome) with X < Y < Z per position.
struct PauliOutcomeIndex {
  PauliString basis;
  std::string outcome;
};

// Empirical outcome frequencies per (basis, outcome) row. shots_per_basis = 0
// marks exact probabilities.
struct DataVector {
  int n = 0;
  long long shots_per_basis = 0;
  rvec values;                    // length 3^n * 2^n, row order as above
  std::vector<long long> counts;  // raw counts; empty in probability mode
  nlohmann::json meta;            // optional provenance block, round-tripped

  int rows() const { return static_cast<int>(values.size()); }

  nlohmann::json to_json() const;
  static DataVector from_json(const nlohmann::json& j);
  static DataVector from_counts(int n, long long shots_per_basis,
                                std::vector<long long> counts);
  static DataVector from_probabilities(int n, const rvec& probabilities);
};

// The linear operators N_{i,j} realizing the bilinear measurement model
// y_i = sum_j xi_j tr[N_{i,j} rho] over all projective Pauli outcomes.
// Operators are materialized once at build time and contracted against
// vec(rho) afterwards.
class MeasurementMap {
 public:
  static MeasurementMap build(const ErrorModelSpec& spec,
                              MapMode mode = MapMode::projective);

  int rows() const { return rows_; }
  int num_coefficients() const { return layout_.size(); }  // k + 1
  int num_qubits() const { return spec_.n; }
  int dim() const { return dim_; }
  MapMode mode() const { return mode_; }
  const ErrorModelSpec& spec() const { return spec_; }
  const CoefficientLayout& layout() const { return layout_; }

  PauliOutcomeIndex row_index(int row) const;
  int row_of(const PauliString& basis, const std::string& outcome) const;
  int basis_of_row(int row) const;

  // N_{row, coeff} as a dense matrix.
  cmat op(int row, int coeff) const;

  // m x (k+1) real matrix with column j = (tr[N_{i,j} h])_i for Hermitian h.
  rmat state_contractions(const cmat& hermitian) const;

  // A(xi, rho): bilinear in (xi, rho).
  rvec apply(const rvec& xi, const cmat& rho) const;
  rvec apply(const CalibrationVector& xi, const cmat& rho) const;

  // sum_i residual_i sum_j xi_j N_{i,j}; adjoint of rho -> A(xi, rho).
  cmat adjoint_state(const rvec& xi, const rvec& residual) const;
  cmat adjoint_state(const CalibrationVector& xi, const rvec& residual) const;

  // (sum_i residual_i tr[N_{i,j} rho])_j; adjoint of xi -> A(xi, rho).
  rvec adjoint_xi(const cmat& rho, const rvec& residual) const;

  // Collapse outcomes into signed sums, one row per basis; N_{i,0} becomes
  // the ideal Pauli observable. Used by the measurement-mode comparison.
  MeasurementMap to_expectation_mode() const;

  // Orthonormal real Hilbert-Schmidt embedding of Hermitian matrices:
  // tr[N h] = vec_real(N) . vec_real(h). Dimension is D^2.
  int real_dim() const { return dim_ * dim_; }
  rvec vec_real(const cmat& hermitian) const;
  cmat mat_from_real(const rvec& coords) const;

  // Stored rows: block j occupies rows [j*m, (j+1)*m) with row i the
  // embedding of N_{i,j}.
  const rmat& real_rows() const { return rows_real_; }

  // sum_j xi_j N_{.,j} as an m x D^2 row matrix; the hot path for fixed-xi
  // applications.
  rmat combined_rows(const rvec& xi) const;

 private:
  MeasurementMap() = default;

  ErrorModelSpec spec_;
  CoefficientLayout layout_;
  MapMode mode_ = MapMode::projective;
  int dim_ = 0;
  int rows_ = 0;
  rmat rows_real_;  // ((k+1) * m) x D^2
};

// Data aligned with a map: projective frequencies as-is, or per-basis signed
// sums for an expectation-mode map.
rvec data_for_map(const MeasurementMap& map, const DataVector& data);

}  // namespace blindcal

#endif
