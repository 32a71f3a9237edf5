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

#include "blindcal/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

#include "blindcal/rng.hpp"

namespace blindcal {

namespace {

constexpr double kPi = 3.14159265358979323846;

int pow3(int n) {
  int out = 1;
  for (int i = 0; i < n; ++i) out *= 3;
  return out;
}

// Embed a single-qubit gate at position q.
cmat embed_gate(const cmat& gate, int q, int n) {
  cmat out = cmat::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    out = kron(out, i == q ? gate : cmat::Identity(2, 2));
  }
  return out;
}

// exp(-i chi X_a X_b) embedded at qubit pair (a, b).
cmat xx_gate(double chi, int a, int b, int n) {
  const int dim = dim_of(n);
  cmat xa = embed_gate(pauli_matrix('X'), a, n);
  cmat xb = embed_gate(pauli_matrix('X'), b, n);
  const complexd i(0.0, 1.0);
  return std::cos(chi) * cmat::Identity(dim, dim) - i * std::sin(chi) * (xa * xb);
}

// Single-qubit arbitrary rotation taking |0> to the (theta, phi) Bloch state.
cmat bloch_prep_gate(double theta_pi, double phi_pi) {
  double half = 0.5 * theta_pi * kPi;
  complexd phase = std::exp(complexd(0.0, phi_pi * kPi));
  cmat u(2, 2);
  u(0, 0) = std::cos(half);
  u(0, 1) = -std::sin(half) * std::conj(phase);
  u(1, 0) = std::sin(half) * phase;
  u(1, 1) = std::cos(half);
  return u;
}

void apply_gate(cmat& rho, const cmat& gate) { rho = gate * rho * gate.adjoint(); }

// X/Y/Z each with probability p/3.
void apply_pauli_channel(cmat& rho, double p, int q, int n) {
  if (p <= 0.0) return;
  cmat mixed = cmat::Zero(rho.rows(), rho.cols());
  for (char letter : {'X', 'Y', 'Z'}) {
    cmat op = embed_gate(pauli_matrix(letter), q, n);
    mixed += op * rho * op.adjoint();
  }
  rho = (1.0 - p) * rho + (p / 3.0) * mixed;
}

struct Gate {
  cmat matrix;
  std::vector<int> qubits;
};

std::vector<Gate> circuit_gates(const CircuitSpec& circuit) {
  std::vector<Gate> gates;
  switch (circuit.kind) {
    case CircuitSpec::Kind::product: {
      for (int q = 0; q < circuit.n; ++q) {
        gates.push_back({embed_gate(bloch_prep_gate(circuit.angles.theta[static_cast<size_t>(q)],
                                                    circuit.angles.phi[static_cast<size_t>(q)]),
                                    q, circuit.n),
                         {q}});
      }
      break;
    }
    case CircuitSpec::Kind::ghz: {
      // R_y(pi/2) on qubit 1, then a CX chain.
      cmat ry = equatorial_rotation(kPi / 2.0, kPi / 2.0);
      gates.push_back({embed_gate(ry, 0, circuit.n), {0}});
      for (int q = 0; q + 1 < circuit.n; ++q) {
        const int dim = dim_of(circuit.n);
        cmat cx = cmat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
          int control_bit = (i >> (circuit.n - 1 - q)) & 1;
          int j = control_bit ? i ^ (1 << (circuit.n - 2 - q)) : i;
          cx(j, i) = 1.0;
        }
        gates.push_back({std::move(cx), {q, q + 1}});
      }
      break;
    }
    case CircuitSpec::Kind::random_deep: {
      for (int q = 0; q < circuit.n; ++q) {
        gates.push_back({embed_gate(bloch_prep_gate(circuit.angles.theta[static_cast<size_t>(q)],
                                                    circuit.angles.phi[static_cast<size_t>(q)]),
                                    q, circuit.n),
                         {q}});
      }
      size_t pair = 0;
      for (int a = 0; a < circuit.n; ++a) {
        for (int b = a + 1; b < circuit.n; ++b) {
          gates.push_back({xx_gate(circuit.chi[pair], a, b, circuit.n), {a, b}});
          ++pair;
        }
      }
      break;
    }
  }
  return gates;
}

std::vector<double> slice_even(const std::vector<double>& flat) {
  std::vector<double> out;
  for (size_t i = 0; i < flat.size(); i += 2) out.push_back(flat[i]);
  return out;
}

std::vector<double> slice_odd(const std::vector<double>& flat) {
  std::vector<double> out;
  for (size_t i = 1; i < flat.size(); i += 2) out.push_back(flat[i]);
  return out;
}

}  // namespace

void ProductStateSpec::normalize_angles() {
  for (size_t q = 0; q < theta.size(); ++q) {
    double t = std::fmod(theta[q], 2.0);
    if (t < 0.0) t += 2.0;
    double f = phi.size() > q ? phi[q] : 0.0;
    if (t > 1.0) {
      t = 2.0 - t;
      f += 1.0;
    }
    f = std::fmod(f, 2.0);
    if (f < 0.0) f += 2.0;
    theta[q] = t;
    if (phi.size() > q) phi[q] = f;
  }
}

CircuitSpec CircuitSpec::product(std::vector<double> theta, std::vector<double> phi) {
  CircuitSpec c;
  c.kind = Kind::product;
  c.n = static_cast<int>(theta.size());
  c.angles.theta = std::move(theta);
  c.angles.phi = std::move(phi);
  c.angles.normalize_angles();
  c.validate();
  return c;
}

CircuitSpec CircuitSpec::ghz(int n) {
  CircuitSpec c;
  c.kind = Kind::ghz;
  c.n = n;
  c.validate();
  return c;
}

CircuitSpec CircuitSpec::random_deep(std::vector<double> theta, std::vector<double> phi,
                                     std::vector<double> chi) {
  CircuitSpec c;
  c.kind = Kind::random_deep;
  c.n = static_cast<int>(theta.size());
  c.angles.theta = std::move(theta);
  c.angles.phi = std::move(phi);
  c.angles.normalize_angles();
  c.chi = std::move(chi);
  c.validate();
  return c;
}

namespace {

CircuitSpec builtin_product(std::initializer_list<double> flat) {
  std::vector<double> v(flat);
  return CircuitSpec::product(slice_even(v), slice_odd(v));
}

CircuitSpec builtin_deep(std::initializer_list<double> flat) {
  std::vector<double> v(flat);
  return CircuitSpec::random_deep(slice_even(v), slice_odd(v),
                                  {kPi / 4.0, kPi / 4.0, kPi / 4.0});
}

const std::map<std::string, CircuitSpec>& builtin_catalog() {
  static const std::map<std::string, CircuitSpec> catalog = {
      {"os1", builtin_product({0.910, 1.978, 0.475, 0.378, 0.467, 0.480})},
      {"os2", builtin_product({0.463, 0.846, 0.742, 1.618, 0.530, 0.726})},
      {"os3", builtin_product({0.0316, 0.259, 0.374, 1.820, 0.372, 0.795})},
      {"os4", builtin_product({0.993, 1.954, 0.494, 0.999, 0.0767, 1.521})},
      {"os5", builtin_product({0.870, 1.967, 0.406, 1.012, 0.426, 0.548})},
      {"os6", builtin_product({0.352, 1.380, 0.707, 0.243, 0.448, 0.219})},
      {"rp1", builtin_product({0.871, 1.427, 0.713, 1.190, 0.693, 1.477})},
      {"rp2", builtin_product({0.723, 1.198, 0.924, 1.533, 0.871, 0.485})},
      {"rp3", builtin_product({0.736, 0.559, 0.654, 0.422, 0.783, 1.211})},
      {"rp4", builtin_product({0.957, 0.105, 0.942, 0.270, 0.704, 0.773})},
      {"zero", builtin_product({0, 0, 0, 0, 0, 0})},
      {"plus", builtin_product({0.5, 0, 0.5, 0, 0.5, 0})},
      {"ghz", CircuitSpec::ghz(3)},
      {"rd1", builtin_deep({0.872, 0.426, 0.714, 0.190, 0.693, 0.477})},
      {"rd2", builtin_deep({0.722, 0.198, 0.923, 1.533, 0.871, 0.485})},
  };
  return catalog;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

CircuitSpec CircuitSpec::builtin(const std::string& name) {
  auto it = builtin_catalog().find(to_lower(name));
  if (it == builtin_catalog().end()) {
    throw std::invalid_argument("CircuitSpec::builtin: unknown state '" + name + "'");
  }
  return it->second;
}

bool CircuitSpec::is_builtin(const std::string& name) {
  return builtin_catalog().count(to_lower(name)) > 0;
}

std::vector<std::string> CircuitSpec::builtin_names() {
  std::vector<std::string> names;
  for (const auto& [name, spec] : builtin_catalog()) names.push_back(name);
  return names;
}

void CircuitSpec::validate() const {
  if (n < 1) throw std::invalid_argument("CircuitSpec: need at least one qubit");
  if (kind != Kind::ghz) {
    if (static_cast<int>(angles.theta.size()) != n ||
        static_cast<int>(angles.phi.size()) != n) {
      throw std::invalid_argument("CircuitSpec: need one (theta, phi) pair per qubit");
    }
  }
  if (kind == Kind::random_deep) {
    size_t pairs = static_cast<size_t>(n) * (static_cast<size_t>(n) - 1) / 2;
    if (chi.size() != pairs) {
      throw std::invalid_argument("CircuitSpec: need one chi per qubit pair");
    }
    for (double c : chi) {
      if (!(c >= 0.0 && c <= kPi / 4.0 + 1e-12)) {
        throw std::invalid_argument("CircuitSpec: chi must lie in [0, pi/4]");
      }
    }
  }
}

cvec CircuitSpec::target_state() const {
  validate();
  cvec state = cvec::Zero(dim_of(n));
  state(0) = 1.0;
  for (const Gate& gate : circuit_gates(*this)) state = gate.matrix * state;
  return state;
}

nlohmann::json CircuitSpec::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::product: j["kind"] = "product"; break;
    case Kind::ghz: j["kind"] = "ghz"; break;
    case Kind::random_deep: j["kind"] = "random_deep"; break;
  }
  j["n"] = n;
  if (kind != Kind::ghz) {
    j["theta"] = angles.theta;
    j["phi"] = angles.phi;
  }
  if (kind == Kind::random_deep) j["chi"] = chi;
  return j;
}

CircuitSpec CircuitSpec::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("name")) return builtin(j.at("name").get<std::string>());
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "ghz") return ghz(j.value("n", 3));
    auto theta = j.at("theta").get<std::vector<double>>();
    auto phi = j.at("phi").get<std::vector<double>>();
    if (kind == "product") return product(std::move(theta), std::move(phi));
    if (kind == "random_deep") {
      return random_deep(std::move(theta), std::move(phi),
                         j.at("chi").get<std::vector<double>>());
    }
    throw SchemaError("circuit: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("circuit: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("circuit: ") + e.what());
  }
}

nlohmann::json NoiseSpec::to_json() const {
  return nlohmann::json{{"pauli_noise_per_gate", pauli_noise_per_gate},
                        {"rng_seed", rng_seed}};
}

NoiseSpec NoiseSpec::from_json(const nlohmann::json& j) {
  NoiseSpec noise;
  noise.pauli_noise_per_gate = j.value("pauli_noise_per_gate", 0.0);
  noise.rng_seed = j.value("rng_seed", static_cast<std::uint64_t>(0));
  if (!(noise.pauli_noise_per_gate >= 0.0 && noise.pauli_noise_per_gate <= 1.0)) {
    throw SchemaError("noise: pauli_noise_per_gate must be a probability");
  }
  return noise;
}

cmat prepare_state(const CircuitSpec& circuit, const NoiseSpec& noise) {
  circuit.validate();
  if (!(noise.pauli_noise_per_gate >= 0.0 && noise.pauli_noise_per_gate <= 1.0)) {
    throw std::invalid_argument("prepare_state: noise strength must be a probability");
  }
  const int dim = dim_of(circuit.n);
  cmat rho = cmat::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (const Gate& gate : circuit_gates(circuit)) {
    apply_gate(rho, gate.matrix);
    for (int q : gate.qubits) {
      apply_pauli_channel(rho, noise.pauli_noise_per_gate, q, circuit.n);
    }
  }
  return hermitize(rho);
}

rvec exact_channel_probabilities(const PhysicalParams& params, const cmat& rho) {
  PhysicalParams z = params;
  z.validate_and_normalize();
  const int dim = static_cast<int>(rho.rows());
  int n = 0;
  while ((1 << n) < dim) ++n;
  if ((1 << n) != dim || rho.cols() != dim) {
    throw std::invalid_argument("exact_channel_probabilities: state must be 2^n x 2^n");
  }
  const rmat readout = readout_stochastic_exact(z, n);
  rvec out(pow3(n) * dim);
  int basis_counter = 0;
  for (const PauliString& p : PauliString::all_bases(n)) {
    cmat u = premeasure_unitary(z, p);
    cmat evolved = u * rho * u.adjoint();
    rvec born = evolved.diagonal().real();
    rvec read = readout * born;
    out.segment(basis_counter * dim, dim) = read;
    ++basis_counter;
  }
  return out;
}

DataVector sample_counts(const rvec& probabilities, int num_qubits,
                         long long shots_per_basis, std::uint64_t seed) {
  const int outcomes = dim_of(num_qubits);
  const int bases = pow3(num_qubits);
  if (probabilities.size() != static_cast<Eigen::Index>(bases) * outcomes) {
    throw std::invalid_argument("sample_counts: probability vector has wrong length");
  }
  if (shots_per_basis == 0) {
    return DataVector::from_probabilities(num_qubits, probabilities);
  }
  if (shots_per_basis < 0) {
    throw std::invalid_argument("sample_counts: negative shot count");
  }
  std::vector<long long> counts(static_cast<size_t>(bases) * outcomes, 0);
  Rng rng(seed);
  for (int b = 0; b < bases; ++b) {
    rvec p = probabilities.segment(b * outcomes, outcomes);
    for (int o = 0; o < outcomes; ++o) {
      if (p(o) < -1e-9) {
        throw std::invalid_argument("sample_counts: negative probability beyond tolerance");
      }
      if (p(o) < 0.0) p(o) = 0.0;
    }
    double total = p.sum();
    if (std::abs(total - 1.0) > 1e-9) {
      std::cerr << "sample_counts: basis " << b << " probabilities sum to " << total
                << ", renormalizing\n";
    }
    if (total <= 0.0) throw std::invalid_argument("sample_counts: basis with zero mass");
    p /= total;
    rvec cdf(outcomes);
    double acc = 0.0;
    for (int o = 0; o < outcomes; ++o) {
      acc += p(o);
      cdf(o) = acc;
    }
    cdf(outcomes - 1) = 1.0;
    for (long long s = 0; s < shots_per_basis; ++s) {
      double u = rng.uniform();
      int o = 0;
      while (o < outcomes - 1 && u >= cdf(o)) ++o;
      ++counts[static_cast<size_t>(b * outcomes + o)];
    }
  }
  return DataVector::from_counts(num_qubits, shots_per_basis, std::move(counts));
}

PhysicalParams inject_miscalibration(const PhysicalParams& base, double extra_or,
                                     double extra_ct) {
  if (!(extra_or >= 0.0 && extra_or <= 0.1) || !(extra_ct >= 0.0 && extra_ct <= 0.1)) {
    throw std::invalid_argument("inject_miscalibration: injections must lie in [0, 0.1]");
  }
  PhysicalParams out = base;
  out.xi_or += extra_or;
  out.xi_l += extra_ct;
  out.xi_r += extra_ct;
  return out;
}

DataVector simulate_dataset(const PhysicalParams& zeta, const CircuitSpec& circuit,
                            const NoiseSpec& noise, long long shots_per_basis,
                            std::uint64_t seed) {
  cmat rho = prepare_state(circuit, noise);
  rvec probabilities = exact_channel_probabilities(zeta, rho);
  return sample_counts(probabilities, circuit.n, shots_per_basis, seed);
}

}  // namespace blindcal
