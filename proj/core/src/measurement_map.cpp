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

#include "blindcal/measurement_map.hpp"

#include <algorithm>
#include <cmath>

namespace blindcal {

namespace {

int pow3(int n) {
  int out = 1;
  for (int i = 0; i < n; ++i) out *= 3;
  return out;
}

int basis_index(const PauliString& p) {
  int index = 0;
  for (int q = 0; q < p.num_qubits(); ++q) {
    int digit = p.letter(q) == 'X' ? 0 : (p.letter(q) == 'Y' ? 1 : 2);
    index = index * 3 + digit;
  }
  return index;
}

constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace

// ---------------------------------------------------------------------------
// DataVector
// ---------------------------------------------------------------------------

nlohmann::json DataVector::to_json() const {
  const int outcomes = 1 << n;
  const int bases = pow3(n);
  nlohmann::json basis_list = nlohmann::json::array();
  auto basis_strings = PauliString::all_bases(n);
  auto outcome_strings = all_bitstrings(n);
  for (int b = 0; b < bases; ++b) {
    nlohmann::json entry;
    entry["basis"] = basis_strings[static_cast<size_t>(b)].str();
    nlohmann::json payload = nlohmann::json::object();
    for (int o = 0; o < outcomes; ++o) {
      int row = b * outcomes + o;
      if (shots_per_basis > 0) {
        long long c = counts[static_cast<size_t>(row)];
        if (c != 0) payload[outcome_strings[static_cast<size_t>(o)]] = c;
      } else {
        double v = values(row);
        if (v != 0.0) payload[outcome_strings[static_cast<size_t>(o)]] = v;
      }
    }
    entry[shots_per_basis > 0 ? "counts" : "probabilities"] = payload;
    basis_list.push_back(std::move(entry));
  }
  nlohmann::json out{{"n", n}, {"shots_per_basis", shots_per_basis}, {"bases", basis_list}};
  if (!meta.is_null()) out["meta"] = meta;
  return out;
}

DataVector DataVector::from_json(const nlohmann::json& j) {
  DataVector data;
  try {
    data.n = j.at("n").get<int>();
    data.shots_per_basis = j.at("shots_per_basis").get<long long>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("data vector: ") + e.what());
  }
  if (data.n < 1) throw SchemaError("data vector: n must be positive");
  const int outcomes = 1 << data.n;
  const int bases = pow3(data.n);
  const int rows = bases * outcomes;
  data.values = rvec::Zero(rows);
  if (data.shots_per_basis > 0) data.counts.assign(static_cast<size_t>(rows), 0);

  std::vector<bool> seen(static_cast<size_t>(bases), false);
  if (!j.contains("bases") || !j.at("bases").is_array()) {
    throw SchemaError("data vector: missing 'bases' array");
  }
  for (const auto& entry : j.at("bases")) {
    std::string basis_str;
    try {
      basis_str = entry.at("basis").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("data vector basis entry: ") + e.what());
    }
    PauliString basis = [&] {
      try {
        return PauliString(basis_str);
      } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("data vector: ") + e.what());
      }
    }();
    if (basis.num_qubits() != data.n) {
      throw SchemaError("data vector: basis '" + basis_str + "' has wrong length");
    }
    int b = basis_index(basis);
    seen[static_cast<size_t>(b)] = true;
    const char* key = data.shots_per_basis > 0 ? "counts" : "probabilities";
    if (!entry.contains(key)) {
      throw SchemaError("data vector: basis '" + basis_str + "' missing '" +
                        std::string(key) + "'");
    }
    for (const auto& [outcome, value] : entry.at(key).items()) {
      int o;
      try {
        o = bitstring_index(outcome);
      } catch (const std::invalid_argument&) {
        throw SchemaError("data vector: bad outcome '" + outcome + "'");
      }
      if (static_cast<int>(outcome.size()) != data.n) {
        throw SchemaError("data vector: outcome '" + outcome + "' has wrong length");
      }
      int row = b * outcomes + o;
      if (data.shots_per_basis > 0) {
        long long c = value.get<long long>();
        if (c < 0) throw SchemaError("data vector: negative count");
        data.counts[static_cast<size_t>(row)] = c;
        data.values(row) =
            static_cast<double>(c) / static_cast<double>(data.shots_per_basis);
      } else {
        data.values(row) = value.get<double>();
      }
    }
  }
  for (int b = 0; b < bases; ++b) {
    if (!seen[static_cast<size_t>(b)]) {
      throw SchemaError("data vector: basis " +
                        PauliString::all_bases(data.n)[static_cast<size_t>(b)].str() +
                        " missing");
    }
  }
  if (j.contains("meta")) data.meta = j.at("meta");
  return data;
}

DataVector DataVector::from_counts(int n, long long shots_per_basis,
                                   std::vector<long long> counts) {
  DataVector data;
  data.n = n;
  data.shots_per_basis = shots_per_basis;
  data.counts = std::move(counts);
  data.values = rvec(static_cast<Eigen::Index>(data.counts.size()));
  for (size_t i = 0; i < data.counts.size(); ++i) {
    data.values(static_cast<Eigen::Index>(i)) =
        static_cast<double>(data.counts[i]) / static_cast<double>(shots_per_basis);
  }
  return data;
}

DataVector DataVector::from_probabilities(int n, const rvec& probabilities) {
  DataVector data;
  data.n = n;
  data.shots_per_basis = 0;
  data.values = probabilities;
  return data;
}

// ---------------------------------------------------------------------------
// MeasurementMap
// ---------------------------------------------------------------------------

rvec MeasurementMap::vec_real(const cmat& hermitian) const {
  const int d = dim_;
  rvec v(real_dim());
  int idx = d;
  for (int i = 0; i < d; ++i) v(i) = hermitian(i, i).real();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      v(idx++) = kSqrt2 * hermitian(i, j).real();
      v(idx++) = kSqrt2 * hermitian(i, j).imag();
    }
  }
  return v;
}

cmat MeasurementMap::mat_from_real(const rvec& coords) const {
  const int d = dim_;
  cmat h(d, d);
  int idx = d;
  for (int i = 0; i < d; ++i) h(i, i) = coords(i);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      complexd value(coords(idx) / kSqrt2, coords(idx + 1) / kSqrt2);
      idx += 2;
      h(i, j) = value;
      h(j, i) = std::conj(value);
    }
  }
  return h;
}

rmat MeasurementMap::combined_rows(const rvec& xi) const {
  if (xi.size() != num_coefficients()) {
    throw std::invalid_argument("combined_rows: coefficient count mismatch");
  }
  rmat out = xi(0) * rows_real_.topRows(rows_);
  for (int j = 1; j < num_coefficients(); ++j) {
    if (xi(j) != 0.0) out += xi(j) * rows_real_.middleRows(j * rows_, rows_);
  }
  return out;
}

MeasurementMap MeasurementMap::build(const ErrorModelSpec& spec, MapMode mode) {
  spec.validate();
  MeasurementMap map;
  map.spec_ = spec;
  map.layout_ = coefficient_layout(spec);
  map.mode_ = MapMode::projective;
  map.dim_ = dim_of(spec.n);
  const int outcomes = map.dim_;
  const int bases = pow3(spec.n);
  map.rows_ = bases * outcomes;
  const int coeffs = map.layout_.size();

  map.rows_real_ = rmat::Zero(coeffs * map.rows_, map.real_dim());

  // Readout derivatives are basis-independent; cache per coefficient.
  std::vector<rmat> readout_d(static_cast<size_t>(coeffs));
  for (int j = 1; j < coeffs; ++j) {
    const std::string& name = map.layout_.names[static_cast<size_t>(j)];
    if (is_readout_coefficient(name)) {
      readout_d[static_cast<size_t>(j)] = readout_derivative(name, spec.n);
    }
  }

  const auto outcome_strings = all_bitstrings(spec.n);
  const cmat eye2 = cmat::Identity(2, 2);
  int basis_counter = 0;
  for (const PauliString& p : PauliString::all_bases(spec.n)) {
    BasisExpansion expansion = basis_rotation_expansion(spec, p);
    // Ideal projectors for every outcome of this basis.
    std::vector<cmat> ideal_proj(static_cast<size_t>(outcomes));
    for (int o = 0; o < outcomes; ++o) {
      const std::string& bits = outcome_strings[static_cast<size_t>(o)];
      cmat proj;
      for (int q = 0; q < spec.n; ++q) {
        double sign = bits[static_cast<size_t>(q)] == '0' ? 1.0 : -1.0;
        cmat factor = 0.5 * (eye2 + sign * expansion.ideal[static_cast<size_t>(q)]);
        proj = (q == 0) ? factor : kron(proj, factor);
      }
      ideal_proj[static_cast<size_t>(o)] = std::move(proj);
    }

    for (int o = 0; o < outcomes; ++o) {
      const int row = basis_counter * outcomes + o;
      map.rows_real_.row(row) = map.vec_real(ideal_proj[static_cast<size_t>(o)]);
    }

    // Rotation coefficients: differentiate the projector product qubit by
    // qubit so that outcome sums cancel exactly.
    int rotation_counter = 0;
    for (int j = 1; j < coeffs; ++j) {
      const std::string& name = map.layout_.names[static_cast<size_t>(j)];
      if (is_readout_coefficient(name)) continue;
      const auto& derivs = expansion.derivatives[static_cast<size_t>(rotation_counter)];
      ++rotation_counter;
      for (int o = 0; o < outcomes; ++o) {
        const std::string& bits = outcome_strings[static_cast<size_t>(o)];
        const int dim = map.dim_;
        cmat term = cmat::Zero(dim, dim);
        for (int q = 0; q < spec.n; ++q) {
          cmat contribution;
          for (int i = 0; i < spec.n; ++i) {
            double sign = bits[static_cast<size_t>(i)] == '0' ? 1.0 : -1.0;
            cmat factor =
                (i == q) ? cmat(0.5 * sign * derivs[static_cast<size_t>(i)])
                         : cmat(0.5 * (eye2 + sign * expansion.ideal[static_cast<size_t>(i)]));
            contribution = (i == 0) ? factor : kron(contribution, factor);
          }
          term += contribution;
        }
        const int row = basis_counter * outcomes + o;
        map.rows_real_.row(j * map.rows_ + row) = map.vec_real(term);
      }
    }

    // Readout coefficients: derivative of the stochastic matrix applied to
    // the ideal projectors of this basis.
    for (int j = 1; j < coeffs; ++j) {
      const std::string& name = map.layout_.names[static_cast<size_t>(j)];
      if (!is_readout_coefficient(name)) continue;
      const rmat& ds = readout_d[static_cast<size_t>(j)];
      for (int o = 0; o < outcomes; ++o) {
        cmat term = cmat::Zero(map.dim_, map.dim_);
        for (int c = 0; c < outcomes; ++c) {
          if (ds(o, c) != 0.0) term += ds(o, c) * ideal_proj[static_cast<size_t>(c)];
        }
        const int row = basis_counter * outcomes + o;
        map.rows_real_.row(j * map.rows_ + row) = map.vec_real(term);
      }
    }
    ++basis_counter;
  }

  if (mode == MapMode::expectation) return map.to_expectation_mode();
  return map;
}

PauliOutcomeIndex MeasurementMap::row_index(int row) const {
  const int outcomes = dim_;
  if (mode_ == MapMode::expectation) {
    return PauliOutcomeIndex{
        PauliString::all_bases(spec_.n)[static_cast<size_t>(row)], std::string()};
  }
  return PauliOutcomeIndex{
      PauliString::all_bases(spec_.n)[static_cast<size_t>(row / outcomes)],
      index_to_bitstring(row % outcomes, spec_.n)};
}

int MeasurementMap::row_of(const PauliString& basis, const std::string& outcome) const {
  int b = basis_index(basis);
  if (mode_ == MapMode::expectation) return b;
  return b * dim_ + bitstring_index(outcome);
}

int MeasurementMap::basis_of_row(int row) const {
  return mode_ == MapMode::expectation ? row : row / dim_;
}

cmat MeasurementMap::op(int row, int coeff) const {
  return mat_from_real(rows_real_.row(coeff * rows_ + row).transpose());
}

rmat MeasurementMap::state_contractions(const cmat& hermitian) const {
  rvec stacked = rows_real_ * vec_real(hermitian);
  return Eigen::Map<const rmat>(stacked.data(), rows_, num_coefficients());
}

rvec MeasurementMap::apply(const rvec& xi, const cmat& rho) const {
  if (xi.size() != num_coefficients()) {
    throw std::invalid_argument("MeasurementMap::apply: coefficient count mismatch");
  }
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw std::invalid_argument("MeasurementMap::apply: state dimension mismatch");
  }
  return state_contractions(rho) * xi;
}

rvec MeasurementMap::apply(const CalibrationVector& xi, const cmat& rho) const {
  return apply(xi.values, rho);
}

cmat MeasurementMap::adjoint_state(const rvec& xi, const rvec& residual) const {
  if (residual.size() != rows_) {
    throw std::invalid_argument("MeasurementMap::adjoint_state: residual length mismatch");
  }
  rvec stacked(num_coefficients() * rows_);
  for (int j = 0; j < num_coefficients(); ++j) {
    stacked.segment(j * rows_, rows_) = xi(j) * residual;
  }
  return mat_from_real(rows_real_.transpose() * stacked);
}

cmat MeasurementMap::adjoint_state(const CalibrationVector& xi, const rvec& residual) const {
  return adjoint_state(xi.values, residual);
}

rvec MeasurementMap::adjoint_xi(const cmat& rho, const rvec& residual) const {
  if (residual.size() != rows_) {
    throw std::invalid_argument("MeasurementMap::adjoint_xi: residual length mismatch");
  }
  return state_contractions(rho).transpose() * residual;
}

MeasurementMap MeasurementMap::to_expectation_mode() const {
  if (mode_ != MapMode::projective) {
    throw std::invalid_argument("to_expectation_mode: map is already in expectation mode");
  }
  MeasurementMap out;
  out.spec_ = spec_;
  out.layout_ = layout_;
  out.mode_ = MapMode::expectation;
  out.dim_ = dim_;
  const int bases = rows_ / dim_;
  out.rows_ = bases;
  const int coeffs = num_coefficients();
  out.rows_real_ = rmat::Zero(coeffs * bases, real_dim());
  const auto outcomes = all_bitstrings(spec_.n);
  for (int j = 0; j < coeffs; ++j) {
    for (int b = 0; b < bases; ++b) {
      for (int o = 0; o < dim_; ++o) {
        double sign = outcome_parity_sign(outcomes[static_cast<size_t>(o)]);
        out.rows_real_.row(j * bases + b) +=
            sign * rows_real_.row(j * rows_ + b * dim_ + o);
      }
    }
  }
  return out;
}

rvec data_for_map(const MeasurementMap& map, const DataVector& data) {
  if (data.n != map.num_qubits()) {
    throw std::invalid_argument("data_for_map: qubit count mismatch");
  }
  const int outcomes = map.dim();
  const int bases = pow3(data.n);
  if (data.rows() != bases * outcomes) {
    throw std::invalid_argument("data_for_map: row count mismatch");
  }
  if (map.mode() == MapMode::projective) return data.values;
  rvec out = rvec::Zero(bases);
  const auto outcome_strings = all_bitstrings(data.n);
  for (int b = 0; b < bases; ++b) {
    for (int o = 0; o < outcomes; ++o) {
      out(b) += outcome_parity_sign(outcome_strings[static_cast<size_t>(o)]) *
                data.values(b * outcomes + o);
    }
  }
  return out;
}

}  // namespace blindcal
