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

#ifndef BLINDCAL_OPERATORS_HPP
#define BLINDCAL_OPERATORS_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace blindcal {

using complexd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-12;

// Hilbert dimension 2^n.
inline int dim_of(int num_qubits) { return 1 << num_qubits; }

// A full-weight Pauli measurement basis: one letter of {X, Y, Z} per qubit.
// Qubit 1 is the leftmost letter; tensor products nest left-to-right, so
// qubit 1 is the most significant bit of a computational-basis index.
class PauliString {
 public:
  explicit PauliString(std::string letters);

  int num_qubits() const { return static_cast<int>(letters_.size()); }
  char letter(int qubit) const { return letters_[static_cast<size_t>(qubit)]; }
  const std::string& str() const { return letters_; }

  bool operator==(const PauliString& other) const { return letters_ == other.letters_; }

  // All 3^n bases in lexicographic order with X < Y < Z per position.
  static std::vector<PauliString> all_bases(int num_qubits);

 private:
  std::string letters_;
};

// Single-qubit Pauli matrix for letter 'X', 'Y' or 'Z'.
cmat pauli_matrix(char letter);

// Kronecker product, left factor on the most significant qubits.
cmat kron(const cmat& a, const cmat& b);

// n-fold tensor product of the single-qubit Paulis of p. Involutory, traceless.
cmat pauli_operator(const PauliString& p);

// Rank-1 projector onto the joint eigenstate of p with signs (-1)^{b_i}.
// The 2^n projectors of a fixed basis sum to the identity.
cmat basis_projector(const PauliString& p, const std::string& outcome);

// All 2^n bitstrings of length n in lexicographic order.
std::vector<std::string> all_bitstrings(int num_qubits);
// Index of a bitstring in lexicographic order (qubit 1 = most significant).
int bitstring_index(const std::string& bits);
std::string index_to_bitstring(int index, int num_qubits);
// Product of (-1)^{b_i} over the string.
int outcome_parity_sign(const std::string& bits);

bool is_hermitian(const cmat& a, double tol = kHermTol);
cmat hermitize(const cmat& a);

struct EigH {
  rvec eigenvalues;   // sorted descending
  cmat eigenvectors;  // unitary, columns aligned with eigenvalues
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Ties between degenerate eigenvalues keep the solver-native order;
// callers must not rely on eigenvector phases or degenerate ordering.
EigH eig_hermitian(const cmat& a, double herm_tol = kHermTol);

// d_tr(rho, sigma) = 1/2 sum |eig(rho - sigma)|, in [0, 1] for states.
double trace_distance(const cmat& rho, const cmat& sigma);

// Largest eigenvalue of a Hermitian matrix.
double dominant_eigenvalue(const cmat& rho);

// Checks entrywise Hermiticity, eigenvalue floor -1e-10 and unit trace.
bool is_density_matrix(const cmat& rho, double trace_tol = 1e-10);

// Normalized pure product state from per-qubit Bloch angles in units of pi:
// each qubit is cos(theta*pi/2)|0> + e^{i*phi*pi} sin(theta*pi/2)|1>.
cvec product_state(const std::vector<double>& theta_pi, const std::vector<double>& phi_pi);

}  // namespace blindcal

#endif
