// Copyright 2026 The qcommit-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>

namespace qcl {

/// Every numeric tolerance used by the library. One record so reports can
/// embed exactly what a run used.
struct Tolerances {
  double hermitian = 1e-12;    // |M - M^dagger| elementwise
  double trace = 1e-10;        // |Tr(rho) - 1|
  double psd = 1e-10;          // smallest admissible eigenvalue is -psd
  double povm = 1e-10;         // completeness, elementwise
  double unitary = 1e-10;      // |V^dagger V - I| elementwise
  double norm = 1e-10;         // | ||psi|| - 1 |
  double probability = 1e-12;  // distributions, threshold ties
  double pgm_support = 1e-12;  // eigenvalues below this are outside supp(S)
  std::size_t max_dense_entries = std::size_t{1} << 20;
};

/// Process-wide tolerances. Set once at startup (CLI overrides) before any
/// concurrent work; read-only afterwards.
const Tolerances& tolerances();
void set_tolerances(const Tolerances& tol);

/// Restores the previous tolerances on scope exit. Test helper.
class ScopedTolerances {
 public:
  explicit ScopedTolerances(const Tolerances& tol) : saved_(tolerances()) {
    set_tolerances(tol);
  }
  ~ScopedTolerances() { set_tolerances(saved_); }
  ScopedTolerances(const ScopedTolerances&) = delete;
  ScopedTolerances& operator=(const ScopedTolerances&) = delete;

 private:
  Tolerances saved_;
};

}  // namespace qcl
