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

#ifndef BLINDCAL_TEST_HELPERS_HPP
#define BLINDCAL_TEST_HELPERS_HPP

#include "blindcal/operators.hpp"
#include "blindcal/rng.hpp"

namespace blindcal::testing {

inline cmat random_hermitian(int dim, Rng& rng, double scale = 1.0) {
  cmat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = complexd(rng.normal(), rng.normal());
    }
  }
  return scale * hermitize(a);
}

inline cvec random_state_vector(int dim, Rng& rng) {
  cvec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = complexd(rng.normal(), rng.normal());
  v.normalize();
  return v;
}

// Random full-rank density matrix via a Wishart-style construction.
inline cmat random_density(int dim, Rng& rng) {
  cmat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = complexd(rng.normal(), rng.normal());
    }
  }
  cmat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline PauliString random_pauli_string(int n, Rng& rng) {
  std::string s;
  const char letters[3] = {'X', 'Y', 'Z'};
  for (int q = 0; q < n; ++q) {
    s += letters[static_cast<int>(rng.uniform() * 3.0) % 3];
  }
  return PauliString(s);
}

}  // namespace blindcal::testing

#endif
