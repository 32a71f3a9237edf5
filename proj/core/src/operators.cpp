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

#include "blindcal/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blindcal {

PauliString::PauliString(std::string letters) : letters_(std::move(letters)) {
  if (letters_.empty()) {
    throw std::invalid_argument("PauliString: empty letter sequence");
  }
  for (char c : letters_) {
    if (c != 'X' && c != 'Y' && c != 'Z') {
      throw std::invalid_argument("PauliString: letters must be X, Y or Z, got '" +
                                  std::string(1, c) + "'");
    }
  }
}

std::vector<PauliString> PauliString::all_bases(int num_qubits) {
  if (num_qubits < 1) throw std::invalid_argument("all_bases: need at least one qubit");
  const char alphabet[3] = {'X', 'Y', 'Z'};
  int total = 1;
  for (int i = 0; i < num_qubits; ++i) total *= 3;
  std::vector<PauliString> out;
  out.reserve(static_cast<size_t>(total));
  for (int index = 0; index < total; ++index) {
    std::string s(static_cast<size_t>(num_qubits), 'X');
    int rem = index;
    for (int q = num_qubits - 1; q >= 0; --q) {
      s[static_cast<size_t>(q)] = alphabet[rem % 3];
      rem /= 3;
    }
    out.emplace_back(std::move(s));
  }
  return out;
}

cmat pauli_matrix(char letter) {
  cmat m(2, 2);
  const complexd i(0.0, 1.0);
  switch (letter) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_matrix: unknown letter");
  }
  return m;
}

cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

cmat pauli_operator(const PauliString& p) {
  cmat op = pauli_matrix(p.letter(0));
  for (int q = 1; q < p.num_qubits(); ++q) {
    op = kron(op, pauli_matrix(p.letter(q)));
  }
  return op;
}

cmat basis_projector(const PauliString& p, const std::string& outcome) {
  if (static_cast<int>(outcome.size()) != p.num_qubits()) {
    throw std::invalid_argument("basis_projector: outcome length mismatch");
  }
  const cmat eye = cmat::Identity(2, 2);
  cmat proj;
  for (int q = 0; q < p.num_qubits(); ++q) {
    char b = outcome[static_cast<size_t>(q)];
    if (b != '0' && b != '1') {
      throw std::invalid_argument("basis_projector: outcome must be a bitstring");
    }
    double sign = (b == '0') ? 1.0 : -1.0;
    cmat factor = 0.5 * (eye + sign * pauli_matrix(p.letter(q)));
    proj = (q == 0) ? factor : kron(proj, factor);
  }
  return proj;
}

std::vector<std::string> all_bitstrings(int num_qubits) {
  const int total = dim_of(num_qubits);
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) out.push_back(index_to_bitstring(i, num_qubits));
  return out;
}

int bitstring_index(const std::string& bits) {
  int index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring_index: not a bitstring");
    index = (index << 1) | (c == '1' ? 1 : 0);
  }
  return index;
}

std::string index_to_bitstring(int index, int num_qubits) {
  std::string s(static_cast<size_t>(num_qubits), '0');
  for (int q = num_qubits - 1; q >= 0; --q) {
    if (index & 1) s[static_cast<size_t>(q)] = '1';
    index >>= 1;
  }
  return s;
}

int outcome_parity_sign(const std::string& bits) {
  int sign = 1;
  for (char c : bits) {
    if (c == '1') sign = -sign;
  }
  return sign;
}

bool is_hermitian(const cmat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

cmat hermitize(const cmat& a) { return 0.5 * (a + a.adjoint()); }

EigH eig_hermitian(const cmat& a, double herm_tol) {
  if (!is_hermitian(a, herm_tol)) {
    throw std::invalid_argument("eig_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<cmat> solver(hermitize(a));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  }
  const Eigen::Index d = a.rows();
  EigH out;
  out.eigenvalues = rvec(d);
  out.eigenvectors = cmat(d, d);
  // SelfAdjointEigenSolver returns ascending order; flip to descending.
  for (Eigen::Index i = 0; i < d; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(d - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return out;
}

double trace_distance(const cmat& rho, const cmat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  EigH eig = eig_hermitian(rho - sigma, 1e-9);
  return 0.5 * eig.eigenvalues.cwiseAbs().sum();
}

double dominant_eigenvalue(const cmat& rho) {
  return eig_hermitian(rho, 1e-9).eigenvalues(0);
}

bool is_density_matrix(const cmat& rho, double trace_tol) {
  if (!is_hermitian(rho, kHermTol)) return false;
  if (std::abs(rho.trace().real() - 1.0) > trace_tol) return false;
  EigH eig = eig_hermitian(rho);
  return eig.eigenvalues.minCoeff() >= -1e-10;
}

cvec product_state(const std::vector<double>& theta_pi, const std::vector<double>& phi_pi) {
  if (theta_pi.empty() || theta_pi.size() != phi_pi.size()) {
    throw std::invalid_argument("product_state: need matching non-empty angle lists");
  }
  const double pi = 3.14159265358979323846;
  cvec state = cvec::Ones(1);
  for (size_t q = 0; q < theta_pi.size(); ++q) {
    cvec qubit(2);
    double half = 0.5 * theta_pi[q] * pi;
    qubit(0) = std::cos(half);
    qubit(1) = std::exp(complexd(0.0, phi_pi[q] * pi)) * std::sin(half);
    cvec next(state.size() * 2);
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      next(2 * i) = state(i) * qubit(0);
      next(2 * i + 1) = state(i) * qubit(1);
    }
    state = std::move(next);
  }
  state.normalize();
  return state;
}

}  // namespace blindcal
