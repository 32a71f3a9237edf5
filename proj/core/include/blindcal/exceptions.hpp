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

#ifndef BLINDCAL_EXCEPTIONS_HPP
#define BLINDCAL_EXCEPTIONS_HPP

#include <stdexcept>

namespace blindcal {

// Malformed or inconsistent input files / documents.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite objectives and other numerical aborts.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace blindcal

#endif
